import pytest

import os
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

import ratsode.config as cfg
from ratsode.algebra import RatFunc, derivative, hermite_integrate
from ratsode.service import SOLVED, PipelineResult


EXAMPLE1_EQUATION = "wp^4 - 8*wp^3 + (6 + 24*w)*wp^2 + 257 + 528*w^2 - 256*w^3 - 552*w"
EXAMPLE1_PARAM_W = "17/16 - 27*t + 2187/2*t^2 + 531441*t^4"
EXAMPLE1_PARAM_WP = "78732*t^3 + 81*t - 1"

EXAMPLE2_EQUATION = "wp^2 + 2*w*wp/z - 4*z*w^3 + (1 + 12*z^2)*w^2/z^2 - 12*w/z + 4/z^2"
EXAMPLE2_PARAM_W = "(t^2*z^2 + 4*t^2 - 6*t*z + 1 + 4*z^2)/(4*z*(t - z)^2)"
EXAMPLE2_PARAM_WP = ("-(-4*z^3 + 13*t*z^2 + t + 2*t^2*z^3 - 10*t^2*z + t^3*z^4 + t^3*z^2 + 4*t^3)"
                     "/(4*z^2*(t - z)^3)")
EXAMPLE2_SOLUTION = ("(z^2*lambda^2 - 2*z*lambda^3 + 4*z*lambda + 4 + lambda^4 - 3*lambda^2)"
                     "/((z*lambda + 2 - lambda^2)^2*z)")


def integer_residue_potential(rng, max_poles=4, max_residue=9):
    """r = v0' + v0^2 for v0 = sum a_i/(z - z_i) with integer a_i.

    Every solution of v' + v^2 = r is v0 + 1/(N (lambda + int 1/N)) with
    N = prod (z - z_i)^(2 a_i), so the family is rational exactly when
    int 1/N has no logarithmic part. Returns (v0, r, rational).
    """
    z = RatFunc.var("z")
    k = int(rng.integers(1, max_poles + 1))
    poles = rng.choice(list(range(-6, 7)), size=k, replace=False)
    residues = [int(a) for a in rng.choice([a for a in range(-max_residue, max_residue + 1) if a],
                                           size=k)]
    v0 = RatFunc.new(0)
    N = RatFunc.new(1)
    for c, a in zip(poles, residues):
        v0 = v0 + a / (z - int(c))
        N = N * (z - int(c)) ** (2 * a)
    _, rational = hermite_integrate(1 / N)
    return v0, derivative(v0, "z") + v0 * v0, rational


class FakeGenus:
    def __init__(self):
        self.samples = ((3, 0), (-5, 0), (11, 0))
        self.consensus = 0


class FakeService:
    def __init__(self, result: PipelineResult | None = None):
        self.result = result or PipelineResult(
            status=SOLVED,
            reason="rational general solution found (case1)",
            verified=True,
        )
        self.calls = []

    def solve_file(self, path, samples=None, seed=None, verify=None):
        self.calls.append({"path": str(path), "samples": samples, "seed": seed, "verify": verify})
        return self.result


@pytest.fixture()
def fake_service():
    return FakeService()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture()
def z():
    return RatFunc.var("z")


@pytest.fixture()
def lam():
    return RatFunc.var("lambda")


@pytest.fixture()
def example1_text():
    return (
        "# autonomous quartic\n"
        f"equation: {EXAMPLE1_EQUATION}\n"
    )


@pytest.fixture()
def example1_param_text():
    return (
        f"equation: {EXAMPLE1_EQUATION}\n"
        f"param_w: {EXAMPLE1_PARAM_W}\n"
        f"param_wp: {EXAMPLE1_PARAM_WP}\n"
    )


@pytest.fixture()
def example2_text():
    return (
        f"equation: {EXAMPLE2_EQUATION}\n"
        f"param_w: {EXAMPLE2_PARAM_W}\n"
        f"param_wp: {EXAMPLE2_PARAM_WP}\n"
    )


@pytest.fixture()
def tmp_problems(monkeypatch, tmp_path: Path, example1_text, example2_text):
    data_dir = tmp_path / "data"
    data_dir.mkdir(parents=True, exist_ok=True)

    monkeypatch.setattr(cfg, "DATA_DIR", data_dir, raising=False)

    paths = {
        "example1": data_dir / "example1.problem",
        "example2": data_dir / "example2.problem",
        "elliptic": data_dir / "elliptic.problem",
        "linear": data_dir / "linear.problem",
        "broken": data_dir / "broken.problem",
    }
    paths["example1"].write_text(example1_text, encoding="utf-8")
    paths["example2"].write_text(example2_text, encoding="utf-8")
    paths["elliptic"].write_text("equation: wp^2 - w^3 - 1\n", encoding="utf-8")
    paths["linear"].write_text("equation: wp - 1\n", encoding="utf-8")
    paths["broken"].write_text("equation: wp^2 - (w + \n", encoding="utf-8")
    paths["data_dir"] = data_dir
    return paths
