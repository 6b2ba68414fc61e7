"""Command-line front end.

Every subcommand writes one JSON document (or CSV for sweeps) to stdout and
diagnostics to stderr. Exit codes: 0 success, 1 domain error or failed
check, 2 usage error.
"""

from __future__ import annotations

import argparse
import inspect
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import catalog, fock, gkp, physicality, stellar
from .core import (
    SCHEMA_VERSION,
    AbcTriple,
    ContractionPlan,
    apply,
    contract,
    from_dict,
    join_all,
    outer,
    to_dict,
)
from .errors import BargmannError, DomainError, SchemaError
from .phase_space import (
    ChannelXY,
    PhaseSpaceState,
    SymplecticUnitary,
    abc_to_channel,
    abc_to_state,
    abc_to_unitary,
    channel_to_abc,
    state_to_abc,
    unitary_to_abc,
)
from .sdp import GAP_TOL


class UsageError(Exception):
    """Bad command-line input that argparse cannot catch (exit code 2)."""


# ---------------------------------------------------------------------------
# JSON helpers


def _doc(doc_type: str, /, **payload) -> dict:
    return {"schema_version": SCHEMA_VERSION, "type": doc_type, **payload}


def _jsonable(x):
    if isinstance(x, AbcTriple):
        return to_dict(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        # JSON has no inf/nan; keep them readable and reversible
        return x if math.isfinite(x) else repr(x)
    return x


def _emit(doc, out=None) -> None:
    out = out or sys.stdout
    out.write(json.dumps(_jsonable(doc), indent=1))
    out.write("\n")


def _read_json(path: str) -> dict:
    try:
        if path == "-":
            d = json.load(sys.stdin)
        else:
            with open(path) as fh:
                d = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: malformed JSON ({exc})") from exc
    except OSError as exc:
        raise DomainError(f"{path}: {exc.strerror}") from exc
    if not isinstance(d, dict):
        raise SchemaError(f"{path}: expected a JSON object")
    if str(d.get("schema_version")) != SCHEMA_VERSION:
        raise SchemaError(f"{path}: unsupported schema_version {d.get('schema_version')!r}")
    return d


def _read_triple(path: str) -> AbcTriple:
    return from_dict(_read_json(path))


def _fock_doc(arr: np.ndarray, layout=None) -> dict:
    a = np.asarray(arr, dtype=complex)
    d = {"shape": list(a.shape), "re": a.real.ravel().tolist(), "im": a.imag.ravel().tolist()}
    if layout is not None:
        d["layout"] = layout.to_list()
    return d


def _fock_from_doc(d: dict) -> np.ndarray:
    try:
        shape = tuple(int(s) for s in d["shape"])
        re = np.array(d["re"], dtype=float)
        im = np.array(d.get("im", np.zeros_like(re)), dtype=float)
        return (re + 1j * im).reshape(shape)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed Fock document: {exc}") from exc


def _parse_value(s: str):
    """Scalars, complex numbers (``1+2j``) or JSON lists."""
    s = s.strip()
    if s.startswith("["):
        return json.loads(s)
    try:
        return float(s)
    except ValueError:
        pass
    try:
        return complex(s.replace(" ", ""))
    except ValueError:
        raise UsageError(f"cannot parse parameter value {s!r}") from None


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"parameters must look like key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = _parse_value(v)
    return out


def _ints(s: str) -> list[int]:
    try:
        return [int(x) for x in s.split(",") if x.strip() != ""]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {s!r}") from None


def _json_param(v):
    """Circuit parameters may be numbers, ``[re, im]`` pairs or matrices of those."""
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    if isinstance(v, list):
        return np.array([[_json_param(x) for x in row] if isinstance(row, list) else row for row in v])
    return v


# ---------------------------------------------------------------------------
# Circuits


@dataclass
class CircuitSpec:
    n_modes: int
    ops: list
    herald: dict | None = None
    hbar: float = 2.0
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "CircuitSpec":
        try:
            n = int(d["n_modes"])
            ops = list(d["ops"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed circuit: {exc}") from exc
        for op in ops:
            if "gate" not in op or "modes" not in op:
                raise SchemaError("every circuit op needs 'gate' and 'modes'")
            if op["gate"] not in catalog.UNITARIES and op["gate"] not in catalog.CHANNELS:
                raise SchemaError(f"unknown gate {op['gate']!r}")
            if any(not 0 <= int(m) < n for m in op["modes"]):
                raise SchemaError(f"gate {op['gate']!r} acts on a mode outside 0..{n - 1}")
        return cls(n, ops, d.get("herald"), float(d.get("hbar", 2.0)))


def _gate(op: dict) -> AbcTriple:
    name = op["gate"]
    entry = catalog.UNITARIES.get(name) or catalog.CHANNELS[name]
    params = {k: _json_param(v) for k, v in op.get("params", {}).items()}
    modes = [int(m) for m in op["modes"]]
    sig = inspect.signature(entry.builder).parameters
    if "modes" in sig:
        params["modes"] = modes
    elif "mode" in sig:
        if len(modes) != 1:
            raise SchemaError(f"gate {name!r} acts on exactly one mode")
        params["mode"] = modes[0]
    return entry(**params)


def build_circuit(spec: CircuitSpec) -> AbcTriple:
    """Vacuum on every mode, then the ops in list (temporal) order."""
    state = join_all([catalog.vacuum(1, modes=[m]) for m in range(spec.n_modes)])
    for op in spec.ops:
        state = apply(_gate(op), state)
    return state


# ---------------------------------------------------------------------------
# Subcommands


def cmd_triple(args) -> int:
    if args.name not in catalog.ALL:
        raise BargmannError(f"unknown catalog name {args.name!r}")
    params = _parse_params(args.params)
    for k, v in list(params.items()):
        if isinstance(v, complex) and v.imag == 0:
            params[k] = v.real
        if k in ("n", "env_mode"):
            params[k] = int(params[k])
    sig = inspect.signature(catalog.ALL[args.name].builder).parameters
    if args.modes is not None:
        modes = _ints(args.modes)
        if "modes" in sig:
            params["modes"] = modes
        else:
            params["mode"] = modes[0]
    if "hbar" in sig:
        params.setdefault("hbar", args.hbar)
    _emit(to_dict(catalog.build(args.name, **params)))
    return 0


def cmd_contract(args) -> int:
    left = _read_triple(args.left)
    right = _read_triple(args.right)
    if args.apply:
        out = apply(left, right)
    else:
        if not args.pairs:
            raise UsageError("contract needs --pairs or --apply")
        pairs = []
        for p in args.pairs.split(","):
            try:
                i, j = p.split(":")
                pairs.append((int(i), int(j)))
            except ValueError:
                raise UsageError(f"pairs look like i:j, got {p!r}") from None
        flags = tuple([args.conjugate_left] * len(pairs)) if args.conjugate_left else None
        out = contract(left, right, ContractionPlan(tuple(pairs), flags))
    _emit(to_dict(out))
    return 0


def _modes_arg(s):
    return None if s is None else _ints(s)


def cmd_convert(args) -> int:
    d = _read_json(args.input)
    hbar = float(d.get("hbar", args.hbar))
    src, dst = args.from_, args.to
    ordering = d.get("ordering", args.ordering) if src != "abc" else args.ordering
    if src != "abc" and dst != "abc":
        raise UsageError("one side of a conversion must be abc")
    if src == "cov":
        ps = PhaseSpaceState(np.array(d["sigma"]), d.get("mu"), hbar, ordering)
        out = to_dict(state_to_abc(ps, _modes_arg(args.modes)))
    elif src == "symplectic":
        su = SymplecticUnitary(np.array(d["S"]), d.get("d"), ordering)
        out = to_dict(unitary_to_abc(su, hbar, _modes_arg(args.modes)))
    elif src == "xy":
        ch = ChannelXY(np.array(d["X"]), np.array(d["Y"]), d.get("d"), ordering)
        out = to_dict(channel_to_abc(ch, hbar, _modes_arg(args.modes)))
    else:
        obj = from_dict(d)
        if dst == "cov":
            ps = abc_to_state(obj, hbar, ordering)
            out = _doc("phase-space-state", sigma=ps.sigma, mu=ps.mu, hbar=hbar, ordering=ordering)
        elif dst == "symplectic":
            su = abc_to_unitary(obj, hbar).to(ordering)
            out = _doc("symplectic", S=su.S, d=su.d, hbar=hbar, ordering=ordering)
        elif dst == "xy":
            ch = abc_to_channel(obj, hbar).to(ordering)
            out = _doc("channel-xy", X=ch.X, Y=ch.Y, d=ch.d, hbar=hbar, ordering=ordering)
        else:
            raise UsageError("abc to abc is not a conversion")
    _emit(out)
    return 0


def cmd_fock(args) -> int:
    obj = _read_triple(args.triple)
    cut = _ints(args.cutoff)
    cutoffs = cut[0] if len(cut) == 1 else cut
    f = fock.fock_amplitudes_stable if args.stable else fock.fock_amplitudes
    arr = f(obj, cutoffs)
    _emit(_doc("fock-array", **_fock_doc(arr.data, arr.layout)))
    return 0


def cmd_herald(args) -> int:
    spec = CircuitSpec.from_dict(_read_json(args.circuit))
    state = build_circuit(spec)
    pattern = _ints(args.pattern)
    if args.modes is not None:
        modes = _ints(args.modes)
    elif spec.herald and "modes" in spec.herald:
        modes = [int(m) for m in spec.herald["modes"]]
    else:
        modes = list(range(spec.n_modes - len(pattern), spec.n_modes))
    res = fock.herald(state, fock.HeraldSpec(tuple(modes), tuple(pattern)), decompose=not args.truncate, cutoff=args.cutoff)
    doc = _doc(
        "herald-result",
        measured_modes=modes,
        pattern=pattern,
        exact=res.exact,
        core=_fock_doc(res.amplitudes.data, res.amplitudes.layout),
        transform=None if res.transform is None else to_dict(res.transform),
        probability=res.probability,
        tail_witness=res.witness,
    )
    if args.apply_cutoff and res.exact and res.transform is not None:
        if res.amplitudes.layout.is_ket:
            vec = fock.apply_unitary(res.transform, res.amplitudes.data, args.apply_cutoff)
            doc["applied"] = _fock_doc(vec)
        else:
            print("applied vector is only produced for pure heralded states", file=sys.stderr)
    _emit(doc)
    return 0


def cmd_decompose(args) -> int:
    obj = _read_triple(args.triple)
    m = args.m
    if args.kind == "pure":
        dec = stellar.pure_decompose(obj, m)
        doc = _doc("decomposition", kind="pure", core=dec.core, transform=dec.unitary, feasible=True, witnesses={})
    elif args.kind == "formal":
        dec = stellar.formal_decompose(obj, m)
        doc = _doc(
            "decomposition", kind="formal", core=dec.core_vector, transform=dec.t_operator, feasible=True,
            witnesses={"wire_map": [[w.mode, w.kind.value] for w in dec.wire_map]},
        )
    else:
        if obj.layout.is_ket:
            obj = outer(obj)
        dec = stellar.mixed_decompose(obj, m, args.rank_tol)
        wit = dict(dec.witnesses)
        wit["rank_witness"] = dec.rank_witness
        wit["pure_core"] = dec.pure_core
        if dec.feasible:
            doc = _doc("decomposition", kind="mixed", core=dec.core, transform=dec.channel, feasible=True, witnesses=wit)
        else:
            doc = _doc(
                "decomposition", kind="mixed", core=dec.formal.core_vector, transform=dec.formal.t_operator,
                feasible=False, witnesses=wit,
            )
    _emit(doc)
    return 0


def cmd_check(args) -> int:
    obj = _read_triple(args.triple)
    rep = physicality.check(obj, args.as_)
    _emit(_doc("physicality-report", **{"as": args.as_, "ok": rep.ok}, **rep.to_dict()))
    return 0 if rep.ok else 1


def _parse_staircase(s: str):
    try:
        sq, th = s.split(";")
        return [float(x) for x in sq.split(",")], [float(x) for x in th.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"staircase looks like 'db1,db2,...;theta1,...', got {s!r}") from None


def _parse_sweep(s: str):
    try:
        a, b, n = s.split(":")
        return gkp.loss_grid(float(a), float(b), int(n))
    except ValueError:
        raise UsageError(f"loss sweep looks like start:stop:count, got {s!r}") from None


def cmd_gkp_bound(args) -> int:
    hbar = args.hbar
    if args.staircase:
        sq, th = _parse_staircase(args.staircase)
        if args.loss_sweep:
            rows = gkp.loss_sweep(sq, th, _parse_sweep(args.loss_sweep), hbar, args.output_loss, not args.no_stellar)
            if args.out == "csv":
                sys.stdout.write(gkp.rows_to_csv(rows))
            else:
                _emit(_doc("loss-sweep", columns=["eta", "bound_db_sdp", "bound_db_stellar", "gap"], rows=rows))
            return 0
        spec = gkp.StaircaseSpec(sq, th, args.loss, args.output_loss)
        dm, ps = gkp.build_staircase(spec, hbar)
        res = gkp.sdp_bound(ps, 1, args.direction, hbar, tol=args.tol)
        doc = _doc("gkp-bound", **res.to_dict())
        if not args.no_stellar and len(sq) == 2:
            try:
                doc["stellar"] = gkp.stellar_bound(dm, 1, args.direction, hbar).to_dict()
            except BargmannError as exc:
                doc["stellar"] = {"error": str(exc)}
    elif args.cov:
        d = _read_json(args.cov)
        ps = PhaseSpaceState(np.array(d["sigma"]), d.get("mu"), float(d.get("hbar", hbar)), d.get("ordering", "xpxp"))
        res = gkp.sdp_bound(ps, args.m, args.direction, ps.hbar, tol=args.tol)
        doc = _doc("gkp-bound", **res.to_dict())
    else:
        raise UsageError("gkp-bound needs --staircase or --cov")
    _emit(doc)
    return 0 if res.status == "optimal" else 1


def cmd_effsq(args) -> int:
    if args.triple:
        es = gkp.effective_squeezing(_read_triple(args.triple), args.hbar)
    elif args.fock:
        es = gkp.effective_squeezing(_fock_from_doc(_read_json(args.fock)), args.hbar)
    else:
        raise UsageError("effsq needs --triple or --fock")
    _emit(_doc("effective-squeezing", **es.to_dict()))
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bargmann", description="Abc calculus for Gaussian objects.")
    p.add_argument("--hbar", type=float, default=2.0, help="value of hbar (default 2)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("triple", help="emit a catalog triple")
    s.add_argument("name")
    s.add_argument("--params", nargs="*", default=[], metavar="K=V")
    s.add_argument("--modes", help="comma-separated mode labels")
    s.set_defaults(func=cmd_triple)

    s = sub.add_parser("contract", help="contract two triples")
    s.add_argument("--left", required=True)
    s.add_argument("--right", required=True)
    s.add_argument("--pairs", help="wire index pairs i:j,...")
    s.add_argument("--conjugate-left", action="store_true")
    s.add_argument("--apply", action="store_true", help="apply LEFT as an operator or channel to RIGHT")
    s.set_defaults(func=cmd_contract)

    s = sub.add_parser("convert", help="phase space <-> Abc")
    s.add_argument("--from", dest="from_", required=True, choices=["cov", "symplectic", "xy", "abc"])
    s.add_argument("--to", required=True, choices=["cov", "symplectic", "xy", "abc"])
    s.add_argument("--input", required=True, help="JSON file ('-' for stdin)")
    s.add_argument("--ordering", default="xxpp", choices=["xxpp", "xpxp"])
    s.add_argument("--modes")
    s.set_defaults(func=cmd_convert)

    s = sub.add_parser("fock", help="Fock amplitudes of a triple")
    s.add_argument("--triple", required=True)
    s.add_argument("--cutoff", required=True, help="n or n1,n2,...")
    s.add_argument("--stable", action="store_true")
    s.set_defaults(func=cmd_fock)

    s = sub.add_parser("herald", help="exact heralding of a circuit")
    s.add_argument("--circuit", required=True)
    s.add_argument("--pattern", required=True)
    s.add_argument("--modes", help="measured modes (default: circuit herald or the last modes)")
    s.add_argument("--truncate", action="store_true", help="skip the decomposition; needs --cutoff")
    s.add_argument("--cutoff", type=int)
    s.add_argument("--apply-cutoff", type=int, help="also return the transformed vector truncated here")
    s.set_defaults(func=cmd_herald)

    s = sub.add_parser("decompose", help="stellar decompositions")
    s.add_argument("kind", choices=["pure", "mixed", "formal"])
    s.add_argument("--triple", required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--rank-tol", type=float, default=stellar.RANK_RTOL)
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("check", help="physicality report")
    s.add_argument("--triple", required=True)
    s.add_argument("--as", dest="as_", required=True, choices=["ket", "dm", "channel"])
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("gkp-bound", help="SDP bound on effective squeezing")
    s.add_argument("--staircase", help="'db1,db2,...;theta1,...'")
    s.add_argument("--loss", type=float, default=0.0)
    s.add_argument("--loss-sweep", help="start:stop:count")
    s.add_argument("--output-loss", action="store_true", help="also apply the loss to the candidate mode")
    s.add_argument("--cov", help="covariance JSON (sigma, mu, hbar, ordering)")
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--direction", default="sym", choices=list(gkp.DIRECTIONS))
    s.add_argument("--tol", type=float, default=GAP_TOL)
    s.add_argument("--out", default="json", choices=["json", "csv"])
    s.add_argument("--no-stellar", action="store_true")
    s.set_defaults(func=cmd_gkp_bound)

    s = sub.add_parser("effsq", help="effective squeezing of a single-mode state")
    s.add_argument("--triple")
    s.add_argument("--fock", help="Fock document with shape/re/im")
    s.set_defaults(func=cmd_effsq)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (BargmannError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


run = main

if __name__ == "__main__":
    sys.exit(main())
