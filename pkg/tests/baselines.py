"""Regression baselines for the class scans; run as a script to regenerate."""

import json
from pathlib import Path

from gdms import cantor_system
from gdms.classes import BirkhoffLevelSpec, LocallyConstantFunction, class_inequality_scan, intersection_surrogate

DATA = Path(__file__).parent / "data"
SCAN_FILE = DATA / "class_scan_baseline.json"
INTERSECTION_FILE = DATA / "intersection_baseline.json"


def frequency_g() -> LocallyConstantFunction:
    return LocallyConstantFunction(1, {"0": 1, "1": 0})


def scan_report():
    return class_inequality_scan(cantor_system(), frequency_g(), "1/2", "1/10", t=0.5, m=1, gen_max=3)


def intersection_report():
    g = frequency_g()
    specs = [BirkhoffLevelSpec(g, "3/10", g.default_eps(), 30), BirkhoffLevelSpec(g, "7/10", g.default_eps(), 600)]
    return intersection_surrogate(cantor_system(), specs, t=0.5, gen_max=2)


def main() -> None:
    DATA.mkdir(exist_ok=True)
    SCAN_FILE.write_text(json.dumps(scan_report().to_json(), indent=1, sort_keys=True) + "\n")
    INTERSECTION_FILE.write_text(json.dumps(intersection_report().to_json(), indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
