import json

import pytest

from cli.main import (
    build_parser,
    exit_code_for,
    main,
    parse_positive_int,
    parse_seed,
    render_report,
)
from ratsode.algebra import RatFunc
from ratsode.config import DATA_DIR
from ratsode.reduction import RiccatiODE
from ratsode.riccati import GeneralSolution
from ratsode.service import ERROR, INCONCLUSIVE, NO_RGS, SOLVED, PipelineResult

from conftest import FakeGenus, FakeService


def test_parse_positive_int():
    assert parse_positive_int(None, "samples") == (None, None)
    assert parse_positive_int("7", "samples") == (7, None)
    value, err = parse_positive_int("0", "samples")
    assert value is None and "at least 1" in err
    value, err = parse_positive_int("many", "samples")
    assert value is None and "integer" in err


def test_parse_seed():
    assert parse_seed("0") == (0, None)
    value, err = parse_seed("-3")
    assert value is None and err


@pytest.mark.parametrize(
    "status, cap, code",
    [(SOLVED, False, 0), (NO_RGS, False, 1), (INCONCLUSIVE, False, 2), (ERROR, False, 3),
     (INCONCLUSIVE, True, 4)],
)
def test_exit_codes(status, cap, code):
    assert exit_code_for(PipelineResult(status, "why", resource_cap=cap)) == code


def test_parser_requires_file():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["solve"])


def test_main_passes_options_to_service(fake_service, capsys):
    code = main(["solve", "some.problem", "--samples", "9", "--seed", "4", "--no-verify"],
                service=fake_service)
    assert code == 0
    assert fake_service.calls == [{"path": "some.problem", "samples": 9, "seed": 4, "verify": False}]
    out = capsys.readouterr().out
    assert "status:    solved" in out


def test_main_json_contract(fake_service, capsys):
    code = main(["solve", "x.problem", "--json"], service=fake_service)
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    for k in ["status", "genus", "riccati", "normal_r", "solution", "verified", "reason"]:
        assert k in data
    assert data["status"] == "solved"
    assert isinstance(data["verified"], bool)


def test_main_rejects_bad_samples(fake_service, capsys):
    code = main(["solve", "x.problem", "--samples", "zero"], service=fake_service)
    assert code == 3
    assert fake_service.calls == []
    assert "samples" in capsys.readouterr().err


def test_main_exit_code_follows_status(capsys):
    svc = FakeService(PipelineResult(NO_RGS, "algebraic genus is 1", genus=FakeGenus()))
    assert main(["solve", "x.problem"], service=svc) == 1
    out = capsys.readouterr().out
    assert "reason:    algebraic genus is 1" in out
    assert "z0=3: 0" in out


def test_render_report_with_steps(z, lam):
    from ratsode.parametrization import Parametrization
    from ratsode.reduction import SubstitutionChain

    t = RatFunc.var("t")
    param = Parametrization(t, RatFunc.new(1), "builtin_line")
    result = PipelineResult(
        status=SOLVED,
        reason="rational general solution found (constant_coeff)",
        riccati=RiccatiODE(RatFunc.new(0), RatFunc.new(0), RatFunc.new(1)),
        solution=GeneralSolution(z + lam, "w", "constant_coeff"),
        verified=True,
        parametrization=param,
        chain=SubstitutionChain(()).with_parametrization(param),
    )
    text = render_report(result, show_steps=True)
    assert "solution:  w = z + lambda" in text
    assert "verified:  yes" in text
    assert "parametrization (builtin_line):" in text
    assert "  w = t" in text
    plain = render_report(result)
    assert "substitutions" not in plain


def test_main_end_to_end_on_bundled_problems(capsys):
    assert main(["solve", str(DATA_DIR / "elliptic.problem")]) == 1
    assert "no_rational_general_solution" in capsys.readouterr().out

    assert main(["solve", str(DATA_DIR / "example1.problem"), "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["status"] == "solved"
    assert data["verified"] is True
    assert data["riccati"] == {"A": "0", "B": "0", "C": "1/27"}


def test_main_reports_undecodable_file(tmp_path, capsys):
    path = tmp_path / "latin.problem"
    path.write_bytes(b"equation: wp - 1 \xff\xfe\n")
    assert main(["solve", str(path)]) == 3
    assert "status:    error" in capsys.readouterr().out
