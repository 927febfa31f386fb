import pytest


def write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


@pytest.fixture
def fig1_csv(tmp_path):
    rows = [(g, dp0, 0.01 * g * (1 - dp0), 0.014 * g * (1 - dp0))
            for dp0 in (0.0, 1.0) for g in (0.5, 1.0, 2.0, 4.0)]
    return write_csv(tmp_path / "fig1.csv", ["g", "dp0", "n_coh", "n_coh_over_C0"], rows)


@pytest.fixture
def fig2a_csv(tmp_path):
    rows = [(t, g, 0.0, 0.2, 0.1, 0.7 * t / (1 + g), 0.7 / (1 + g))
            for g in (0.4, 4.0) for t in (1.0, 2.0, 3.0)]
    header = ["gamma_tau", "g", "dp0", "theta", "lambda_op", "tau_qsl_gamma", "ratio"]
    return write_csv(tmp_path / "fig2a.csv", header, rows)


@pytest.fixture
def fig2b_csv(tmp_path):
    rows = [(t, 0.02 * t) for t in (1.0, 2.0, 3.0)]
    return write_csv(tmp_path / "fig2b.csv", ["gamma_tau", "n_coh"], rows)


@pytest.fixture
def fig4_csv(tmp_path):
    rows = [(t, g, dp0, 0.2, 0.1, 0.5 * t, 0.5)
            for g in (4.0, 0.4) for dp0 in (0.0, 1.0) for t in (1.0, 2.0)]
    header = ["gamma_tau", "g", "dp0", "theta", "lambda_op", "tau_qsl_gamma", "ratio"]
    return write_csv(tmp_path / "fig4.csv", header, rows)
