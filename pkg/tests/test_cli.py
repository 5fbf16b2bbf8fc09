import json
from fractions import Fraction

import pytest

from metaplectic import CycValue, builtin_sigma_p3
from metaplectic.cli import (
    ConfigError,
    cyc_from_json,
    cyc_to_json,
    main,
    parse_vector_expression,
    poly_from_json,
    poly_to_json,
)
from metaplectic.repn import sigma_to_dict


def run_cli(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


class TestExampleCommand:
    def test_default_passes(self, capsys):
        rc, out, _ = run_cli(capsys, "--command", "example")
        assert rc == 0
        assert "4/3" in out and "PASS" in out
        assert "gamma(0)" in out  # shell-by-shell breakdown

    def test_second_datum_reports_without_assert(self, capsys):
        rc, out, _ = run_cli(capsys, "--command", "example", "--sigma", "builtin2")
        assert rc == 0
        assert "no assertion" in out

    def test_rejects_even_p(self, capsys):
        rc, _, err = run_cli(capsys, "--p", "2")
        assert rc == 2 and "odd prime" in err

    def test_rejects_builtin_with_wrong_p(self, capsys):
        rc, _, err = run_cli(capsys, "--p", "5")
        assert rc == 2 and "requires p = 3" in err


class TestCheckFe:
    def test_table_output_passes(self, capsys):
        rc, out, _ = run_cli(capsys, "--command", "check-fe")
        assert rc == 0
        assert out.count("PASS") >= 3 and "FAIL" not in out

    def test_json_schema_and_roundtrip(self, capsys):
        rc, out, _ = run_cli(capsys, "--command", "check-fe", "--output", "json")
        assert rc == 0
        report = json.loads(out)
        assert report["command"] == "check-fe"
        for case in report["cases"]:
            assert set(case) == {"xi", "mu", "vector", "lhs", "rhs", "residual",
                                 "pass", "vacuous_parity"}
            for key in ("lhs", "rhs", "residual"):
                poly = case[key]
                assert poly["variable"] in ("q^-s", "q^s")
                back = poly_from_json(3, poly)
                assert poly_to_json(back) == poly
            assert case["pass"] is True

    def test_corrupted_gamma_fails_localized(self, capsys):
        rc, out, _ = run_cli(capsys, "--command", "check-fe", "--corrupt-gamma")
        assert rc == 1
        assert "FAIL" in out and "residual" in out

    def test_parity_vacuous_flagged(self, capsys, tmp_path):
        mu = json.dumps({"conductor_exponent": 1,
                         "value_at_p_numerator_of_exponent": 0,
                         "value_at_p_denominator_of_exponent": 1,
                         "generator_image_exponent": 1})
        rc, out, _ = run_cli(capsys, "--command", "check-fe", "--mu", mu)
        assert rc == 0
        assert "vacuous" in out

    def test_deterministic_output(self, capsys):
        rc1, out1, _ = run_cli(capsys, "--command", "check-fe", "--output", "json")
        rc2, out2, _ = run_cli(capsys, "--command", "check-fe", "--output", "json")
        assert (rc1, out1) == (rc2, out2)


class TestCheckInvariants:
    def test_all_suites_pass(self, capsys):
        rc, out, _ = run_cli(capsys, "--command", "check-invariants",
                             "--trials", "60", "--seed", "7")
        assert rc == 0
        for suite in ("cocycle", "kubota-splitting", "coset-roundtrip", "characters",
                      "hilbert-oracle", "whittaker-equivariance", "bessel-agreement",
                      "shell-vanishing"):
            assert f"PASS  {suite}" in out

    def test_json_output(self, capsys):
        rc, out, _ = run_cli(capsys, "--command", "check-invariants",
                             "--trials", "50", "--output", "json")
        assert rc == 0
        report = json.loads(out)
        assert all(suite["pass"] for suite in report["suites"])


class TestSigmaFiles:
    def test_load_valid_file(self, capsys, tmp_path, ctx):
        path = tmp_path / "sigma.json"
        path.write_text(json.dumps(sigma_to_dict(builtin_sigma_p3(ctx, 1))))
        rc, out, _ = run_cli(capsys, "--command", "example", "--sigma", str(path))
        assert rc == 0 and "no assertion" in out

    def test_reject_non_cuspidal_file(self, capsys, tmp_path, ctx):
        data = sigma_to_dict(builtin_sigma_p3(ctx, 1))
        constant_one = [[[0, 1], [1, 1]]]
        for entry in data["entries"]:
            entry["rep"] = [[constant_one]]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        rc, _, err = run_cli(capsys, "--command", "example", "--sigma", str(path))
        assert rc == 1
        assert "cuspidal" in err or "conductor" in err

    def test_missing_file(self, capsys):
        rc, _, err = run_cli(capsys, "--sigma", "/nonexistent/sigma.json")
        assert rc == 2


class TestVectors:
    def test_expression_parser(self, rep1):
        v = parse_vector_expression(rep1, "2/3*phi(t=1/3, n=0, b=0) - phi(t=0, n=1)")
        assert v.terms[(Fraction(1, 3), 0, 0)] == Fraction(2, 3)
        assert v.terms[(Fraction(0), 1, 0)] == -1

    def test_expression_defaults(self, rep1):
        v = parse_vector_expression(rep1, "phi()")
        assert v.terms == {(Fraction(0), 0, 0): CycValue.one(3)}

    def test_bad_expression(self, rep1):
        with pytest.raises(ConfigError):
            parse_vector_expression(rep1, "psi(t=0)")

    def test_vectors_file(self, capsys, tmp_path):
        path = tmp_path / "vectors.txt"
        path.write_text("phi(t=0, n=0, b=0)\n# comment\n2*phi(n=1) - phi(t=1/3)\n")
        rc, out, _ = run_cli(capsys, "--command", "check-fe", "--vectors", str(path))
        assert rc == 0
        assert out.count("PASS") == 2


class TestSerialization:
    def test_cyc_roundtrip_exact(self, ctx):
        value = (ctx.cyc_e(Fraction(5, 9)) * Fraction(2, 7)
                 + ctx.sqrtq() * ctx.cyc_e(Fraction(1, 4))
                 + ctx.cyc(Fraction(-3, 2)))
        data = cyc_to_json(value)
        assert cyc_from_json(3, data) == value

    def test_mu_spec_inline(self, capsys):
        mu = json.dumps({"conductor_exponent": 0,
                         "value_at_p_numerator_of_exponent": 1,
                         "value_at_p_denominator_of_exponent": 4,
                         "generator_image_exponent": 0})
        rc, out, _ = run_cli(capsys, "--command", "zeta", "--mu", mu, "--output", "json")
        assert rc == 0
        report = json.loads(out)
        assert report["mu"]["value_at_p_numerator_of_exponent"] == 1

    def test_gamma_command_json(self, capsys):
        rc, out, _ = run_cli(capsys, "--command", "gamma", "--output", "json")
        assert rc == 0
        report = json.loads(out)
        case = report["cases"][0]
        poly = poly_from_json(3, case["poly"])
        assert poly.coeffs[0] == Fraction(4, 3)

    def test_bessel_command(self, capsys):
        rc, out, _ = run_cli(capsys, "--command", "bessel")
        assert rc == 0
        assert "J(<x>w)" in out
