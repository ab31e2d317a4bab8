import argparse
import json
import math
import tempfile
import unittest
from pathlib import Path

import pytest

from dtcsim.cli import build_parser, main, parse_angle, parse_bracket, parse_cutoffs, parse_grid, parse_times
from dtcsim.tables import read_table

SMALL_CONFIG = """\
reference_defaults = true

[device]
charge_cutoff = 4

[spectrum]
eigen_count = 12
truncation_levels = 3
"""


class ArgumentParsingTests(unittest.TestCase):
    def test_angles(self):
        self.assertAlmostEqual(parse_angle("pi"), math.pi)
        self.assertAlmostEqual(parse_angle("0.25pi"), math.pi / 4)
        self.assertAlmostEqual(parse_angle("pi/4"), math.pi / 4)
        self.assertAlmostEqual(parse_angle("0.5 * pi"), math.pi / 2)
        self.assertAlmostEqual(parse_angle("1.2"), 1.2)
        with self.assertRaises(argparse.ArgumentTypeError):
            parse_angle("quarter")

    def test_bracket(self):
        self.assertEqual(parse_bracket("20:28"), (20.0, 28.0))
        for bad in ("28:20", "0:5", "20", "a:b"):
            with self.assertRaises(argparse.ArgumentTypeError):
                parse_bracket(bad)

    def test_grid_and_times(self):
        grid = parse_grid("0.5:0.7:3")
        self.assertEqual(len(grid), 3)
        self.assertAlmostEqual(grid[1], 0.6 * math.pi)
        self.assertEqual(parse_grid("0.65"), [0.65 * math.pi])
        self.assertEqual(parse_times("10:20:3"), [10.0, 15.0, 20.0])
        with self.assertRaises(argparse.ArgumentTypeError):
            parse_grid("0.7:0.5:3")
        with self.assertRaises(argparse.ArgumentTypeError):
            parse_times("10:20:1")
        self.assertEqual(parse_cutoffs("5,6, 7"), [5, 6, 7])

    def test_pulse_override_spellings_accumulate(self):
        args = build_parser().parse_args(
            ["gate", "--kind", "sqiswap", "--pulse-overrides", "alpha_over_pi=0", "--pulse-override", "beta_per_ns=0.2"]
        )
        self.assertEqual(args.overrides, ["alpha_over_pi=0", "beta_per_ns=0.2"])


class MainTests(unittest.TestCase):
    def test_help_exits_cleanly(self):
        with self.assertRaises(SystemExit) as ctx:
            main(["--help"])
        self.assertEqual(ctx.exception.code, 0)

    def test_reversed_bracket_is_a_usage_error(self):
        with self.assertRaises(SystemExit) as ctx:
            main(["calibrate", "--kind", "sqiswap", "--bracket", "28:20", "--out", "curve.csv"])
        self.assertEqual(ctx.exception.code, 2)

    def test_no_command(self):
        self.assertEqual(main([]), 2)

    def test_missing_config_file(self):
        self.assertEqual(main(["--config", "/nonexistent/dtcsim.toml", "derived"]), 2)

    def test_invalid_cutoff_override(self):
        self.assertEqual(main(["--cutoff", "0", "derived"]), 2)

    def test_database_without_schema(self):
        self.assertEqual(main(["--db", "sqlite://", "gate", "--kind", "sqiswap"]), 2)


def test_derived_prints_json(capsys):
    assert main(["derived"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert len(summary["omega_J_GHz"]) == 5


def test_print_derived_flag_honours_cutoff(capsys):
    assert main(["--cutoff", "6", "--print-derived"]) == 0
    assert json.loads(capsys.readouterr().out)


def test_zz_sweep_writes_table():
    with tempfile.TemporaryDirectory() as tmp:
        config = Path(tmp) / "small.toml"
        config.write_text(SMALL_CONFIG, encoding="utf-8")
        out = Path(tmp) / "zz.csv"
        code = main(["--config", str(config), "--threads", "2", "sweep", "--what", "zz", "--grid", "0.5:0.7:3", "--out", str(out)])
        assert code == 0
        frame, config_hash = read_table(out)
        assert list(frame.columns) == ["theta_over_pi", "zeta_zz_kHz"]
        assert len(frame) == 3
        assert config_hash is not None and len(config_hash) == 12


@pytest.mark.slow
def test_dump_pulse_at_full_cutoff():
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "pulse.csv"
        assert main(["dump-pulse", "--kind", "sqiswap", "--out", str(out)]) == 0
        frame, _ = read_table(out)
        assert len(frame) == 481
        assert frame["theta_over_pi"].max() == pytest.approx(0.81, abs=0.005)


if __name__ == "__main__":
    unittest.main()
