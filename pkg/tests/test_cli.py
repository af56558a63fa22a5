import json
import math

from conftest import run_cli


def load_json(blob: bytes) -> dict:
    return json.loads(blob.decode("utf-8"))


class TestConstruct:
    def test_identity_function_grids(self):
        code, out, err = run_cli(["construct", "--f", "z",
                                  "--grid", "5x5", "--span", "0.2"])
        assert code == 0, err
        doc = load_json(out)
        assert doc["meta"]["expression"] == "z"
        assert doc["meta"]["C"] == [1.0, 0.0]
        grids = doc["grids"]
        assert set(grids) == {"phi", "psi", "w1", "w2", "conformal_exponent"}
        g = grids["phi"]
        assert g["nx"] == g["ny"] == 5
        # Φ = x and Ψ = y for the identity function
        for iy in range(5):
            for ix in range(5):
                x = g["origin"][0] + ix * g["step"]
                y = g["origin"][1] + iy * g["step"]
                k = iy * 5 + ix
                assert abs(grids["phi"]["values"][k] - x) <= 1e-9
                assert abs(grids["psi"]["values"][k] - y) <= 1e-9

    def test_zero_function_is_translation(self):
        code, out, _ = run_cli(["construct", "--f", "0",
                                "--grid", "5x5", "--span", "0.2"])
        assert code == 0
        doc = load_json(out)
        g = doc["grids"]["w1"]
        for iy in range(5):
            for ix in range(5):
                x = g["origin"][0] + ix * g["step"]
                y = g["origin"][1] + iy * g["step"]
                k = iy * 5 + ix
                assert abs(doc["grids"]["w1"]["values"][k] - (x + 1)) <= 1e-10
                assert abs(doc["grids"]["w2"]["values"][k] - y) <= 1e-10

    def test_malformed_expression_exits_2(self):
        code, out, err = run_cli(["construct", "--f", "z^^"])
        assert code == 2
        assert out == b""
        payload = load_json(err)
        assert payload["error"]["kind"] == "parse"
        assert isinstance(payload["error"]["offset"], int)

    def test_domain_failure_exits_3(self):
        code, _, err = run_cli(["construct", "--f", "1000"])
        assert code == 3
        assert load_json(err)["error"]["kind"] == "domain"

    def test_io_failure_exits_4(self):
        code, _, err = run_cli(["construct", "--f", "z",
                                "--out", "/nonexistent-dir/x.json"])
        assert code == 4
        assert load_json(err)["error"]["kind"] == "io"

    def test_byte_identical_reruns(self):
        args = ["construct", "--f", "exp(z)/2 + z^2", "--grid", "7x7"]
        a = run_cli(args)
        b = run_cli(args)
        assert a[0] == b[0] == 0
        assert a[1] == b[1]

    def test_span_shrunk_with_warning(self):
        code, out, err = run_cli(["construct", "--f", "z", "--span", "100"])
        assert code == 0
        assert b"warning:" in err and b"shrunk" in err
        doc = load_json(out)
        span = doc["grids"]["phi"]["step"] * (doc["grids"]["phi"]["nx"] - 1)
        assert span < doc["meta"]["domain_radius"] * 2

    def test_json_round_trips_doubles(self):
        code, out, _ = run_cli(["construct", "--f", "sin(z)/2", "--grid", "5x5"])
        assert code == 0
        doc = load_json(out)
        again = run_cli(["construct", "--f", "sin(z)/2", "--grid", "5x5"])[1]
        assert load_json(again) == doc  # parsed doubles identical

    def test_out_file(self, tmp_path):
        path = tmp_path / "res.json"
        code, out, _ = run_cli(["construct", "--f", "z", "--grid", "5x5",
                                "--out", str(path)])
        assert code == 0 and out == b""
        doc = json.loads(path.read_text())
        assert "grids" in doc

    def test_csv_format(self, tmp_path):
        code, out, _ = run_cli(["construct", "--f", "z", "--grid", "5x5",
                                "--span", "0.2", "--format", "csv"])
        assert code == 0
        text = out.decode()
        assert "# phi\nx,y,value" in text
        assert "# w\nx,y,w1,w2" in text
        # file-per-grid with a prefix
        prefix = tmp_path / "run"
        code, _, _ = run_cli(["construct", "--f", "z", "--grid", "5x5",
                              "--format", "csv", "--out", str(prefix)])
        assert code == 0
        for name in ("phi", "psi", "w", "conformal_exponent"):
            assert (tmp_path / f"run.{name}.csv").exists()
        header = (tmp_path / "run.w.csv").read_text().splitlines()[0]
        assert header == "x,y,w1,w2"


class TestVerify:
    def test_identity_function_all_pass(self):
        code, out, err = run_cli(["verify", "--f", "z"])
        assert code == 0, err
        doc = load_json(out)
        names = [r["name"] for r in doc["reports"]]
        assert names == ["lemma1_identity", "dual_route", "cr_residual",
                         "pullback", "harmonicity_phi", "harmonicity_psi",
                         "curvature_flat"]
        assert all(r["pass"] for r in doc["reports"])

    def test_zero_function_residual_scales(self):
        code, out, _ = run_cli(["verify", "--f", "0"])
        assert code == 0
        by_name = {r["name"]: r for r in load_json(out)["reports"]}
        assert by_name["dual_route"]["max_abs_residual"] <= 1e-10
        assert by_name["lemma1_identity"]["max_abs_residual"] <= 1e-10
        for name in ("cr_residual", "pullback", "harmonicity_phi",
                     "harmonicity_psi", "curvature_flat"):
            assert by_name[name]["max_abs_residual"] <= 1e-6

    def test_quarter_square_passes(self):
        code, out, _ = run_cli(["verify", "--f", "z^2/4"])
        assert code == 0
        by_name = {r["name"]: r for r in load_json(out)["reports"]}
        assert by_name["pullback"]["max_abs_residual"] <= 1e-5

    def test_failing_tolerance_exits_5(self):
        code, out, _ = run_cli(["verify", "--f", "z", "--tol-pullback", "1e-30"])
        assert code == 5
        doc = load_json(out)
        by_name = {r["name"]: r for r in doc["reports"]}
        assert not by_name["pullback"]["pass"]

    def test_csv_reports(self):
        code, out, _ = run_cli(["verify", "--f", "z", "--format", "csv"])
        assert code == 0
        lines = out.decode().splitlines()
        assert lines[0] == "# reports"
        assert lines[1] == "name,max_abs_residual,tolerance,pass"
        assert len(lines) == 2 + 7


class TestCurvature:
    def test_harmonic_exponent_flat(self):
        code, out, _ = run_cli(["curvature", "--f", "z", "--grid", "5x5",
                                "--span", "0.5"])
        assert code == 0
        doc = load_json(out)
        assert all(abs(v) <= 1e-6 for v in doc["grids"]["curvature"]["values"])

    def test_exponent_sign_flag(self):
        code, out, _ = run_cli(["curvature", "--f", "z^2/4", "--grid", "3x3",
                                "--span", "0.4", "--exponent-sign", "1"])
        assert code == 0
        assert load_json(out)["meta"]["exponent_sign"] == 1

    def test_k0_passthrough(self):
        code, out, _ = run_cli(["curvature", "--f", "0", "--grid", "3x3",
                                "--k0", "2.5"])
        assert code == 0
        vals = load_json(out)["grids"]["curvature"]["values"]
        assert all(abs(v - 2.5) <= 1e-9 for v in vals)


class TestEmbed:
    def test_gaussian_preset(self):
        code, out, _ = run_cli(["embed", "--preset", "gaussian", "--grid", "5x5"])
        assert code == 0
        doc = load_json(out)
        sides = doc["meta"]["side_lengths"]
        assert abs(sides["u"] - math.sqrt(math.pi)) <= 1e-8
        assert abs(sides["v"] - math.sqrt(math.pi)) <= 1e-8

    def test_zero_preset_unit_square(self):
        code, out, _ = run_cli(["embed", "--preset", "zero",
                                "--x-range", "0,1", "--y-range", "0,1",
                                "--grid", "5x5"])
        assert code == 0
        sides = load_json(out)["meta"]["side_lengths"]
        assert abs(sides["u"] - 1.0) <= 1e-12
        assert abs(sides["v"] - 1.0) <= 1e-12

    def test_zero_preset_unbounded(self):
        code, out, _ = run_cli(["embed", "--preset", "zero", "--grid", "5x5"])
        assert code == 0  # divergence is a marker, not an error
        sides = load_json(out)["meta"]["side_lengths"]
        assert sides["u"] == "unbounded"
        assert sides["v"] == "unbounded"

    def test_custom_exponents(self):
        # expressions with a leading dash use the --flag=value form
        code, out, _ = run_cli(["embed", "--a=-z", "--b=0",
                                "--x-range", "0,inf", "--y-range", "0,2",
                                "--grid", "5x5"])
        assert code == 0
        sides = load_json(out)["meta"]["side_lengths"]
        assert abs(sides["u"] - 1.0) <= 1e-10
        assert abs(sides["v"] - 2.0) <= 1e-12

    def test_embedding_grid_values(self):
        code, out, _ = run_cli(["embed", "--preset", "zero",
                                "--x-range", "0,1", "--y-range", "0,1",
                                "--grid", "5x5"])
        doc = load_json(out)
        u = doc["grids"]["u"]
        for iy in range(5):
            for ix in range(5):
                x = u["origin"][0] + ix * u["step"]
                assert abs(u["values"][iy * 5 + ix] - x) <= 1e-12


class TestRobustness:
    def test_shifted_basepoint(self):
        code, out, _ = run_cli(["verify", "--f", "z", "--z0", "0.5,-0.3"])
        assert code == 0
        doc = load_json(out)
        assert all(r["pass"] for r in doc["reports"])
        assert doc["meta"]["basepoint"] == [0.5, -0.3]

    def test_pole_outside_domain_shrinks_and_passes(self):
        # f analytic on a disc avoiding its pole at z=1: validation shrinks
        # the domain until every identity holds
        code, out, _ = run_cli(["verify", "--f", "1/(1-z)"])
        assert code == 0
        doc = load_json(out)
        assert doc["meta"]["domain_radius"] < 1.0
        assert all(r["pass"] for r in doc["reports"])

    def test_asymmetric_grid_shapes(self):
        for shape in ("5x21", "21x5"):
            code, out, err = run_cli(["verify", "--f", "z", "--grid", shape])
            assert code == 0, err
            assert all(r["pass"] for r in load_json(out)["reports"])

    def test_pole_inside_initial_disc_degrades_honestly(self):
        # precondition violated (pole at 0.2 inside the requested disc):
        # the pipeline must not crash; it reports whatever survives on the
        # microscopic domain it can validate
        code, out, _ = run_cli(["verify", "--f", "1/(0.2-z)"])
        assert code in (0, 5)
        doc = load_json(out)
        assert len(doc["reports"]) == 7
        by_name = {r["name"]: r for r in doc["reports"]}
        assert by_name["dual_route"]["pass"]  # analytic route still coherent


class TestBackendSelection:
    def test_forced_pure_backend_agrees(self):
        args = ["construct", "--f", "z^2/4", "--grid", "5x5", "--span", "0.2"]
        _, out_default, _ = run_cli(args)
        code, out_pure, _ = run_cli(args, env_extra={"FLATMAP_BACKEND": "pure"})
        assert code == 0
        a = load_json(out_default)
        b = load_json(out_pure)
        assert a["meta"]["backend"] in ("compiled", "pure")
        assert b["meta"]["backend"] == "pure"
        for name in ("phi", "psi", "w1", "w2"):
            for va, vb in zip(a["grids"][name]["values"], b["grids"][name]["values"]):
                assert abs(va - vb) <= 1e-12

    def test_bogus_backend_rejected(self):
        code, _, err = run_cli(["verify", "--f", "z"],
                               env_extra={"FLATMAP_BACKEND": "gpu"})
        assert code != 0
        assert b"FLATMAP_BACKEND" in err
