"""End-to-end checks of the osgrf command line: outputs, files and exit codes.

Usage: cli_test.py <osgrf binary> <recipe data dir>
"""

import json
import os
import struct
import subprocess
import sys
import tempfile
import unittest

BINARY = ""
DATA = ""


def run(*args, env=None):
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run([BINARY, *args], capture_output=True, text=True, env=full_env, timeout=900)


def recipe(name):
    return os.path.join(DATA, name)


class PseudoNormCommands(unittest.TestCase):
    def test_eval_euclidean(self):
        r = run("pseudonorm", "eval", "--recipe", recipe("euclidean.json"), "--point", "3,4", "--point", "0,0")
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertEqual(r.stdout.splitlines(), ["3,4,5", "0,0,0"])

    def test_eval_worked_example(self):
        r = run("pseudonorm", "eval", "--recipe", recipe("diagonalizable_example.json"), "--point", "1,1",
                "--point", "4,1")
        self.assertEqual(r.returncode, 0, r.stderr)
        rows = [line.split(",") for line in r.stdout.splitlines()]
        self.assertAlmostEqual(float(rows[0][2]), 1.0, places=12)
        self.assertAlmostEqual(float(rows[1][2]), 2.0 + 3.0, places=12)

    def test_eval_points_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            pts = os.path.join(tmp, "pts.csv")
            with open(pts, "w") as f:
                f.write("6,8\n-5,12\n")
            r = run("pseudonorm", "eval", "--recipe", recipe("euclidean.json"), "--points", pts)
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertEqual([line.split(",")[2] for line in r.stdout.splitlines()], ["10", "13"])

    def test_wrong_dimension_is_usage_error(self):
        r = run("pseudonorm", "eval", "--recipe", recipe("euclidean.json"), "--point", "1,2,3")
        self.assertEqual(r.returncode, 2)

    def test_check_all_passes_for_example(self):
        r = run("pseudonorm", "check", "--recipe", recipe("diagonalizable_example.json"), "--suite", "all")
        self.assertEqual(r.returncode, 0, r.stderr)
        report = json.loads(r.stdout)
        self.assertTrue(report["pass"])
        self.assertLessEqual(report["checks"]["homogeneity"]["max_relative_error"], 1e-9)

    def test_phase_ratio_positivity_fails_with_witness(self):
        r = run("pseudonorm", "check", "--recipe", recipe("phase_ratio.json"), "--suite", "positivity")
        self.assertEqual(r.returncode, 1)
        positivity = json.loads(r.stdout)["checks"]["positivity"]
        self.assertFalse(positivity["positive"])
        witness = positivity["witness"]
        self.assertEqual(len(witness), 2)
        self.assertAlmostEqual(abs(witness[1]), 1.0, places=6)

    def test_levelset_of_circle(self):
        r = run("pseudonorm", "levelset", "--recipe", recipe("euclidean.json"), "--level", "2", "--resolution", "16")
        self.assertEqual(r.returncode, 0, r.stderr)
        lines = r.stdout.splitlines()
        self.assertEqual(lines[0], "theta,x,y,status")
        self.assertEqual(len(lines), 17)
        for line in lines[1:]:
            _, x, y, status = line.split(",")
            self.assertEqual(status, "ok")
            self.assertAlmostEqual((float(x) ** 2 + float(y) ** 2) ** 0.5, 2.0, places=8)

    def test_levelset_of_degenerate_norm(self):
        r = run("pseudonorm", "levelset", "--recipe", recipe("phase_ratio.json"), "--level", "1", "--resolution", "64")
        self.assertEqual(r.returncode, 1)
        self.assertIn("degenerate", r.stdout)

    def test_malformed_recipe(self):
        r = run("pseudonorm", "eval", "--recipe", recipe("malformed.json"), "--point", "1,1")
        self.assertEqual(r.returncode, 2)
        self.assertIn("byte", r.stderr)

    def test_missing_recipe_and_unknown_suite(self):
        self.assertEqual(run("pseudonorm", "eval", "--recipe", "/nonexistent.json", "--point", "1").returncode, 2)
        r = run("pseudonorm", "check", "--recipe", recipe("euclidean.json"), "--suite", "bogus")
        self.assertEqual(r.returncode, 2)
        self.assertEqual(run("pseudonorm", "eval").returncode, 2)
        self.assertEqual(run("--help").returncode, 0)


class DensityCommands(unittest.TestCase):
    def test_admissible(self):
        r = run("density", "check", "--recipe", recipe("anisotropic_density.json"))
        self.assertEqual(r.returncode, 0, r.stderr)
        report = json.loads(r.stdout)
        self.assertTrue(report["admissible"])
        self.assertAlmostEqual(report["lambda_min"], 0.5)
        self.assertTrue(report["integrability"]["converged"])

    def test_inadmissible_hurst(self):
        r = run("density", "check", "--recipe", recipe("inadmissible.json"))
        self.assertEqual(r.returncode, 3)
        self.assertIn("H must lie in (0, 0.5)", r.stderr)
        r = run("field", "generate", "--recipe", recipe("fbm2d.json"), "--hurst", "1.5", "--out", os.devnull)
        self.assertEqual(r.returncode, 3)


class FieldCommands(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def generate(self, name, *extra, seed=7, env=None):
        out = self.path(name)
        r = run("field", "generate", "--recipe", recipe("rotation_density.json"), "--out", out, "--seed", str(seed),
                "--grid-n", "64", "--freq-cutoff", "128", *extra, env=env)
        self.assertEqual(r.returncode, 0, r.stderr)
        return out

    def test_binary_file_and_sidecar(self):
        out = self.generate("f.bin")
        with open(out, "rb") as f:
            data = f.read()
        self.assertEqual(data[:4], b"OSGF")
        self.assertEqual(struct.unpack("<5I", data[4:24]), (1, 2, 64, 64, 0))
        self.assertEqual(len(data), 32 + 8 * 64 * 64)
        self.assertEqual(struct.unpack("<d", data[32:40])[0], 0.0)
        with open(out + ".json") as f:
            meta = json.load(f)
        self.assertEqual(meta["seed"], 7)
        self.assertEqual(meta["format"], "bin")
        self.assertEqual(meta["params"]["grid_n"], 64)
        self.assertEqual(meta["params"]["freq_cutoff"], 128)
        self.assertAlmostEqual(meta["density"]["H"], 0.4)
        self.assertLess(meta["imag_residue"], 1e-10)
        values = struct.unpack("<%dd" % (64 * 64), data[32:])
        self.assertAlmostEqual(meta["min"], min(values))
        self.assertAlmostEqual(meta["max"], max(values))

    def test_determinism_across_runs_and_threads(self):
        a = self.generate("a.bin", env={"OSGRF_THREADS": "1"})
        b = self.generate("b.bin", env={"OSGRF_THREADS": "4"})
        c = self.generate("c.bin")
        with open(a, "rb") as fa, open(b, "rb") as fb, open(c, "rb") as fc:
            da = fa.read()
            self.assertEqual(da, fb.read())
            self.assertEqual(da, fc.read())
        d = self.generate("d.bin", seed=8)
        with open(d, "rb") as fd:
            self.assertNotEqual(da, fd.read())

    def test_pgm_and_csv(self):
        pgm = self.generate("f.pgm", "--format", "pgm")
        with open(pgm, "rb") as f:
            data = f.read()
        header = b"P5\n64 64\n65535\n"
        self.assertTrue(data.startswith(header))
        samples = struct.unpack(">%dH" % (64 * 64), data[len(header):])
        self.assertEqual(min(samples), 0)
        self.assertEqual(max(samples), 65535)

        csv = self.generate("f.csv", "--format", "csv")
        with open(csv) as f:
            rows = f.read().splitlines()
        self.assertEqual(len(rows), 64)
        self.assertTrue(all(len(row.split(",")) == 64 for row in rows))
        with open(self.generate("g.bin"), "rb") as f:
            first = struct.unpack("<64d", f.read()[32:32 + 8 * 64])
        self.assertEqual([float(x) for x in rows[0].split(",")], list(first))

    def test_bad_arguments(self):
        r = run("field", "generate", "--recipe", recipe("fbm2d.json"), "--out", self.path("x"), "--grid-n", "48")
        self.assertEqual(r.returncode, 2)
        r = run("field", "generate", "--recipe", recipe("fbm2d.json"), "--out", self.path("x"), "--format", "png")
        self.assertEqual(r.returncode, 2)
        self.assertFalse(os.path.exists(self.path("x")))

    def test_statistics_round_trip(self):
        out = self.generate("s.bin")
        vcsv = self.path("v.csv")
        r = run("field", "verify", "--recipe", recipe("rotation_density.json"), "--suite", "statistics", "--input", out,
                "--variogram-out", vcsv)
        self.assertEqual(r.returncode, 0, r.stderr)
        stats = json.loads(r.stdout)["checks"]["statistics"]
        self.assertTrue(stats["identical"])
        with open(vcsv) as f:
            lines = f.read().splitlines()
        self.assertEqual(lines[0], "hx,hy,count,v")
        self.assertGreater(len(lines), 4)

    def test_verify_covariance_scaling(self):
        r = run("field", "verify", "--recipe", recipe("rotation_density.json"), "--suite", "covariance-scaling",
                "--scale", "2")
        self.assertEqual(r.returncode, 0, r.stderr)
        report = json.loads(r.stdout)
        self.assertTrue(report["pass"])
        for pair in report["checks"]["covariance-scaling"]["pairs"]:
            self.assertLessEqual(pair["deviation"], pair["budget"])

    def test_verify_stationarity_small_grid(self):
        r = run("field", "verify", "--recipe", recipe("fbm2d.json"), "--suite", "stationarity", "--grid-n", "32",
                "--freq-cutoff", "64", "--seed", "5")
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertTrue(json.loads(r.stdout)["pass"])

    def test_verify_unknown_suite(self):
        r = run("field", "verify", "--recipe", recipe("fbm2d.json"), "--suite", "nope")
        self.assertEqual(r.returncode, 2)

    def test_report_to_file(self):
        out = self.path("report.json")
        r = run("density", "check", "--recipe", recipe("fbm2d.json"), "--out", out)
        self.assertEqual(r.returncode, 0, r.stderr)
        with open(out) as f:
            self.assertTrue(json.load(f)["pass"])


if __name__ == "__main__":
    BINARY, DATA = sys.argv[1], sys.argv[2]
    unittest.main(argv=[sys.argv[0], "-v"])
