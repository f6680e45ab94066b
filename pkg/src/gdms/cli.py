"""Command-line entry point: ``gdms <command> --config sys.json ...``.

Every run prints a JSON result record on stdout, optionally writes a CSV
table (``--out``) and always writes a manifest that can be replayed with
``gdms replay manifest.json``. Exit codes: 1 invalid input, 2 resource
cap, 3 failed assertion.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Callable, Optional

from . import __version__
from .classes import (
    LocallyConstantFunction,
    class_inequality_scan,
    level_set_spectrum,
)
from .config import RunConfig, build_system, load_config
from .diophantine import critical_exponent, diophantine_measure_bound
from .errors import GdmsError, InvalidInput, ResourceLimit
from .netmeasure import WHOLE, grid_net_measure, net_measure
from .rational import to_fraction
from .symbolic import CylinderSet
from .thermo import bowen_dimension, pressure_bracket, pressure_spectral
from .verify import run_invariant_suite

log = logging.getLogger("gdms")

DEFAULT_MANIFEST = "gdms-manifest.json"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InvalidInput(message)


# -- argument helpers --------------------------------------------------------


def _floats(text: str) -> list[float]:
    try:
        return [float(to_fraction(x)) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"bad number list {text!r}: {exc}") from None


def _ints(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part[1:]:
                a, b = part.split("-", 1)
                out.extend(range(int(a), int(b) + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise InvalidInput(f"bad integer list {text!r}") from None
    return out


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path} is not valid JSON: {exc}") from None


def _budget(text) -> Any:
    if text in (None, "auto"):
        return "auto"
    try:
        b = int(text)
    except (TypeError, ValueError):
        raise InvalidInput(f"budget must be 'auto' or an integer, got {text!r}") from None
    return b


def _cap_generation(cfg: RunConfig, n: int, what: str) -> None:
    if n > cfg.caps.max_generation:
        raise ResourceLimit(f"{what} = {n} exceeds max_generation = {cfg.caps.max_generation}")


# -- command handlers ----------------------------------------------------------
# Each takes the resolved config and a JSON-safe parameter dict and returns
# (result, certified, csv header, csv rows).


def cmd_dim(cfg, p):
    system = build_system(cfg)
    est = bowen_dimension(system, tol=p["tol"], n=min(10, cfg.caps.max_generation))
    rows = [[repr(est.value), repr(est.lower), repr(est.upper), est.method, est.certified]]
    return est.to_json(), est.certified, ["value", "lower", "upper", "method", "certified"], rows


def cmd_pressure(cfg, p):
    system = build_system(cfg)
    rows, out = [], []
    certified = True
    for n in p["n"]:
        _cap_generation(cfg, n, "n")
    for s in p["s"]:
        for n in p["n"]:
            ests = []
            if p["method"] in ("partition", "both"):
                ests.append(pressure_bracket(system, s, n))
            if p["method"] in ("spectral", "both"):
                ests.append(pressure_spectral(system, s))
            for e in ests:
                certified &= e.certified
                out.append(e.to_json())
                rows.append([repr(s), n, repr(e.lower), repr(e.upper), e.method])
    return out, certified, ["s", "n", "lower", "upper", "method"], rows


def _load_target(system, path):
    if path is None:
        return WHOLE
    data = _read_json(path)
    words = data.get("words") if isinstance(data, dict) else data
    if not isinstance(words, list):
        raise InvalidInput("target JSON must be a list of words or {\"words\": [...]}")
    for w in words:
        system.subshift.require_admissible(w)
    return CylinderSet(words)


def cmd_netmeasure(cfg, p):
    system = build_system(cfg)
    target = _load_target(system, p["target"])
    kw = dict(root=p["root"], target=target, budget=_budget(p["budget"]), precision=cfg.precision)
    if p["m"] == 1:
        res = net_measure(system, p["t"], **kw)
    else:
        res = grid_net_measure(system, p["t"], p["m"], **kw)
    cover = ";".join(",".join(map(str, w)) for w in res.cover) if res.cover is not None else ""
    row = [repr(res.t), ",".join(map(str, res.root)), repr(res.lower), repr(res.upper), res.budget, res.frontier, cover]
    return res.to_json(), res.certified, ["t", "root", "lower", "upper", "budget", "frontier", "cover"], [row]


def _load_g(system, path):
    g = LocallyConstantFunction.from_json(_read_json(path))
    return g.check(system.subshift)


def cmd_class_test(cfg, p):
    system = build_system(cfg)
    _cap_generation(cfg, p["gen_max"], "gen-max")
    g = _load_g(system, p["g"])
    rep = class_inequality_scan(
        system,
        g,
        to_fraction(p["p"]),
        None if p["eps"] is None else to_fraction(p["eps"]),
        t=p["t"],
        m=p["m"],
        schedule=p["Ms"],
        gen_max=p["gen_max"],
        floor=p["floor"],
        budget=_budget(p["budget"]),
    )
    rows = [[",".join(map(str, w)), M, repr(r)] for w, M, r in rep.rows]
    return rep.to_json(), system.certified, ["cylinder", "M", "ratio"], rows


def cmd_spectrum(cfg, p):
    system = build_system(cfg)
    g = _load_g(system, p["g"])
    spec = level_set_spectrum(system, g, p["grid"])
    rows = [[repr(d.p), repr(d.value)] for d in spec]
    return [d.to_json() for d in spec], system.certified, ["p", "dim"], rows


def cmd_diophantine(cfg, p):
    cyl = p["cyl"]
    rows, out = [], []
    for t in p["t"]:
        for n in p["n"]:
            b = diophantine_measure_bound(cyl, p["alpha"], n, t, budget=_budget(p["budget"]))
            out.append({"alpha": p["alpha"], "n": n, "t": t, **b.to_json(), "bound_holds": b.bound_holds})
            rows.append([p["alpha"], n, t, ",".join(map(str, cyl)), repr(b.result.value), repr(b.bound), b.status])
    result = {"critical_exponent": critical_exponent(to_fraction(p["alpha"])), "rows": out}
    return result, True, ["alpha", "n", "t", "cylinder", "dp_value", "bound", "pass"], rows


def cmd_verify(cfg, p):
    system = build_system(cfg)
    rep = run_invariant_suite(system)
    rows = [[c.name, c.passed, c.detail] for c in rep.checks]
    return rep.to_json(), system.certified, ["check", "passed", "detail"], rows


COMMANDS: dict[str, Callable] = {
    "dim": cmd_dim,
    "pressure": cmd_pressure,
    "netmeasure": cmd_netmeasure,
    "class-test": cmd_class_test,
    "spectrum": cmd_spectrum,
    "diophantine": cmd_diophantine,
    "verify": cmd_verify,
}


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gdms", description="Conformal GDMS computations.")
    parser.add_argument("--version", action="version", version=f"gdms {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text, config_required=True):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=config_required, help="system config or manifest JSON")
        sp.add_argument("--out", help="CSV output path")
        sp.add_argument("--manifest", default=DEFAULT_MANIFEST, help="manifest output path")
        sp.add_argument("--max-generation", type=int, help="override caps.max_generation")
        sp.add_argument("--max-cylinders", type=int, help="override caps.max_cylinders")
        sp.add_argument("-v", "--verbose", action="store_true")
        return sp

    sp = add("dim", "Bowen dimension")
    sp.add_argument("--tol", type=float, default=1e-10)

    sp = add("pressure", "pressure brackets")
    sp.add_argument("--s", type=_floats, required=True, help="comma list of exponents")
    sp.add_argument("--n", type=_ints, default=[8], help="comma list or range of generations")
    sp.add_argument("--method", choices=["partition", "spectral", "both"], default="partition")

    sp = add("netmeasure", "net outer measure of a target")
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--root", type=_ints, default=[], help="root word, e.g. 0,1")
    sp.add_argument("--target", help="target JSON (list of words); default: whole cylinder")
    sp.add_argument("--budget", default="auto")
    sp.add_argument("--m", type=int, default=1, help="grid step for N^{m,t}")

    sp = add("class-test", "class inequality scan for a Birkhoff level set")
    sp.add_argument("--g", required=True, help="locally constant function JSON")
    sp.add_argument("--p", required=True)
    sp.add_argument("--eps")
    sp.add_argument("--t", type=float, default=0.5)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--Ms", type=_ints, default=[25, 50, 100, 200])
    sp.add_argument("--gen-max", type=int, default=3)
    sp.add_argument("--floor", type=float)
    sp.add_argument("--budget", default="auto")

    sp = add("spectrum", "level-set dimension spectrum")
    sp.add_argument("--g", required=True)
    sp.add_argument("--grid", type=int, default=50)

    sp = add("diophantine", "mass-distribution bound on the middle-third Cantor set", config_required=False)
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--t", required=True, help="comma list of exponents")
    sp.add_argument("--n", type=_ints, required=True, help="comma list or range")
    sp.add_argument("--cyl", type=_ints, default=[0, 2], help="ternary digits of C")
    sp.add_argument("--budget", default="auto")

    add("verify", "run the invariant suite")

    rp = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    rp.add_argument("manifest_in", metavar="MANIFEST")
    rp.add_argument("--out")
    rp.add_argument("--manifest", default=DEFAULT_MANIFEST)
    rp.add_argument("-v", "--verbose", action="store_true")
    return parser


_GLOBAL = {"command", "config", "out", "manifest", "max_generation", "max_cylinders", "verbose", "manifest_in"}


def _params(args: argparse.Namespace) -> dict:
    p = {k: v for k, v in vars(args).items() if k not in _GLOBAL}
    if args.command == "diophantine":
        p["alpha"] = str(to_fraction(p["alpha"]))
        p["t"] = [str(to_fraction(x)) for x in p["t"].split(",") if x.strip()]
    for key in ("p", "eps"):
        if p.get(key) is not None:
            p[key] = str(to_fraction(p[key]))
    return p


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    if args.config is None:
        data = {"system": {"kind": "cantor"}}
    else:
        data = _read_json(args.config)
        if not isinstance(data, dict):
            raise InvalidInput("config must be a JSON object")
    cfg = load_config(data)
    caps = cfg.caps.model_dump()
    if args.max_generation is not None:
        caps["max_generation"] = args.max_generation
    if args.max_cylinders is not None:
        caps["max_cylinders"] = args.max_cylinders
    return load_config({**cfg.model_dump(exclude={"command", "params", "tool_version"}), "caps": caps})


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def execute(cfg: RunConfig, command: str, params: dict, out: Optional[str], manifest: Optional[str]) -> dict:
    """Run one command and persist its artifacts; returns the result record."""
    if command not in COMMANDS:
        raise InvalidInput(f"unknown command {command!r}")
    start = time.perf_counter()
    result, certified, header, rows = COMMANDS[command](cfg, params)
    wall = time.perf_counter() - start
    resolved = cfg.model_copy(update={"command": command, "params": params, "tool_version": __version__})
    manifest_data = resolved.model_dump(mode="json")
    if out:
        Path(out).write_text(_csv_text(header, rows))
    if manifest:
        Path(manifest).write_text(json.dumps(manifest_data, indent=2, sort_keys=True) + "\n")
    return {
        "command": command,
        "inputs": params,
        "result": result,
        "certification": "certified" if certified else "non-certified",
        "wall_time": wall,
        "tool_version": __version__,
        "csv": out,
        "manifest": manifest_data,
    }


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
        if args.command == "replay":
            cfg = load_config(_read_json(args.manifest_in))
            if cfg.command is None or cfg.params is None:
                raise InvalidInput("manifest has no recorded command")
            command, params = cfg.command, cfg.params
            cfg = cfg.model_copy(update={"command": None, "params": None, "tool_version": None})
        else:
            cfg, command, params = _resolve_config(args), args.command, _params(args)
        record = execute(cfg, command, params, args.out, args.manifest)
        print(json.dumps(record, indent=2))
        if command == "verify" and not record["result"]["passed"]:
            failed = [c["name"] for c in record["result"]["checks"] if not c["passed"]]
            log.error("invariant failures: %s", ", ".join(failed))
            return 3
        return 0
    except GdmsError as exc:
        print(f"gdms: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except AssertionError as exc:
        print(f"gdms: assertion failed: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
