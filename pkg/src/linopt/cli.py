"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 circuit parse/semantic error,
3 numerical validation failure.
"""
import argparse
import csv
from dataclasses import replace
import io
import itertools
import math
import re
import sys

import numpy as np

from .circuit import PHASE, compile_circuit, parse_circuit
from .classical import output_fractions
from .errors import CircuitError, LinoptError, NonUnitaryError, UndefinedParameterError
from .quantum import fock_evolve, propagate_coherent, single_photon_distribution
from .statistics import (
    click_probabilities,
    equivalence_check,
    hom_scan,
    pair_click_probabilities,
    sample_frames,
)
from .transfer import UNITARY_TOL

EXIT_OK, EXIT_USAGE, EXIT_CIRCUIT, EXIT_NUMERIC = 0, 1, 2, 3

_COMPLEX_RE = re.compile(
    r"[+-]?(?:(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)?i?"
    r"(?:[+-](?:(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)?i)?\Z"
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def fmt(x):
    """Shortest round-trip decimal for a float; integers pass through."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def parse_complex(token):
    """Parse ``re+imi`` style literals: ``1``, ``-0.5i``, ``0.3-2e-1i``, ``i``."""
    tok = token.strip()
    if not tok or not _COMPLEX_RE.match(tok):
        raise UsageError(f"invalid complex literal {token!r}")
    tok = re.sub(r"(^|[+-])i$", r"\g<1>1i", tok)
    try:
        return complex(tok.replace("i", "j"))
    except ValueError:
        raise UsageError(f"invalid complex literal {token!r}") from None


def parse_complex_list(text):
    return np.array([parse_complex(t) for t in text.split(",")])


def parse_int_list(text):
    try:
        vals = [int(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None
    return vals


def parse_grid(text):
    parts = text.split(":")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except (ValueError, IndexError):
        raise UsageError(f"grid must be start:stop:steps, got {text!r}") from None
    if len(parts) != 3 or steps < 1 or not (math.isfinite(start) and math.isfinite(stop)):
        raise UsageError(f"grid must be start:stop:steps with steps >= 1, got {text!r}")
    return np.linspace(start, stop, steps)


def _writer(stream):
    return csv.writer(stream, lineterminator="\n")


def _load_circuit(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read circuit file {path!r}: {exc.strerror}") from None
    return parse_circuit(text, source=path)


def _compile(path):
    spec = _load_circuit(path)
    return spec, compile_circuit(spec)


def _need(args, name, flag):
    if getattr(args, name) is None:
        raise UsageError(f"{args.command} requires {flag}")
    return getattr(args, name)


def _write_distribution(w, outcomes, probs):
    w.writerow(["outcome", "probability"])
    for o, p in zip(outcomes, probs):
        w.writerow([o, fmt(p)])


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_compile(args, out):
    _, u = _compile(args.circuit)
    out.write(f"# modes={u.modes}\n")
    w = _writer(out)
    w.writerow(["row", "col", "re", "im"])
    for i, j in itertools.product(range(u.modes), repeat=2):
        z = u.entries[i, j]
        w.writerow([i, j, fmt(z.real), fmt(z.imag)])


def cmd_classical(args, out):
    _, u = _compile(args.circuit)
    fr = output_fractions(u, parse_complex_list(_need(args, "inp", "--in")))
    _write_distribution(_writer(out), range(u.modes), fr)


def cmd_single_photon(args, out):
    _, u = _compile(args.circuit)
    probs = single_photon_distribution(u, _need(args, "in_mode", "--in-mode"))
    _write_distribution(_writer(out), range(u.modes), probs)


def cmd_fock(args, out):
    _, u = _compile(args.circuit)
    state = fock_evolve(u, parse_int_list(_need(args, "inp", "--in")))
    probs = state.probabilities()
    _write_distribution(_writer(out), [",".join(map(str, k)) for k in probs], probs.values())


def cmd_coherent(args, out):
    """Threshold click-pattern distribution of the product coherent output."""
    _, u = _compile(args.circuit)
    p = click_probabilities(propagate_coherent(u, parse_complex_list(_need(args, "inp", "--in"))))
    patterns = list(itertools.product((0, 1), repeat=u.modes))
    probs = [math.prod(p[i] if c else 1.0 - p[i] for i, c in enumerate(pat)) for pat in patterns]
    _write_distribution(_writer(out), [",".join(map(str, pat)) for pat in patterns], probs)


def cmd_hom(args, out):
    rows = hom_scan(parse_grid(_need(args, "grid", "--grid")))
    w = _writer(out)
    w.writerow(["transmittance", "p11", "p20", "p02"])
    for row in rows:
        w.writerow([fmt(x) for x in row])


def cmd_antibunch(args, out):
    _, u = _compile(args.circuit)
    if (args.in_mode is None) == (args.inp is None):
        raise UsageError("antibunch requires exactly one of --in-mode or --in")
    pair = tuple(parse_int_list(args.pair))
    if len(pair) != 2:
        raise UsageError("--pair takes two detector indices i,j")
    alphas = None if args.inp is None else parse_complex_list(args.inp)
    p_i, p_j, p_ij = pair_click_probabilities(u, in_mode=args.in_mode, alphas=alphas, pair=pair)
    if p_i == 0.0 or p_j == 0.0:
        raise UndefinedParameterError("a detector never clicks; A is undefined")
    w = _writer(out)
    w.writerow(["quantity", "value"])
    for name, v in (("p_i", p_i), ("p_j", p_j), ("p_ij", p_ij), ("A", p_ij / (p_i * p_j))):
        w.writerow([name, fmt(v)])


def cmd_sample(args, out):
    spec, u = _compile(args.circuit)
    alphas = parse_complex_list(_need(args, "inp", "--in"))
    w = _writer(out)
    if args.grid is None:
        rec = sample_frames(u, alphas, args.frames, args.seed, workers=args.workers)
        w.writerow(["detector", "singles"])
        for i, s in enumerate(rec.singles):
            w.writerow([i, int(s)])
        w.writerow(["i", "j", "coincidences"])
        for i, j in itertools.combinations(range(rec.modes), 2):
            w.writerow([i, j, int(rec.coincidences[i, j])])
        return
    k = _need(args, "scan_element", "--scan-element")
    if not 0 <= k < len(spec.elements) or spec.elements[k].kind != PHASE:
        raise UsageError(f"--scan-element {k} must name a 'ph' element")
    if not 0 <= args.detector < spec.modes:
        raise UsageError(f"--detector {args.detector} out of range")
    w.writerow(["phase", "value"])
    for idx, ph in enumerate(parse_grid(args.grid)):
        elements = list(spec.elements)
        elements[k] = replace(elements[k], params=(float(ph),))
        uk = compile_circuit(replace(spec, elements=tuple(elements)))
        seed = int(np.random.SeedSequence([args.seed, idx]).generate_state(1, np.uint64)[0])
        rec = sample_frames(uk, alphas, args.frames, seed, workers=args.workers)
        w.writerow([fmt(ph), fmt(rec.rates()[args.detector])])


def cmd_equiv_check(args, out):
    rep = equivalence_check(args.trials, args.max_modes, args.seed)
    w = _writer(out)
    w.writerow(["trials", "max_deviation", "worst_trial", "worst_mode"])
    w.writerow([rep.trials, fmt(rep.max_deviation), rep.worst_trial, rep.worst_mode])
    return EXIT_OK if rep.passed(args.tol) else EXIT_NUMERIC


COMMANDS = {
    "compile": cmd_compile,
    "classical": cmd_classical,
    "single-photon": cmd_single_photon,
    "fock": cmd_fock,
    "coherent": cmd_coherent,
    "hom": cmd_hom,
    "antibunch": cmd_antibunch,
    "sample": cmd_sample,
    "equiv-check": cmd_equiv_check,
}

_NEEDS_CIRCUIT = {"compile", "classical", "single-photon", "fock", "coherent", "antibunch", "sample"}


def build_parser():
    p = _Parser(prog="linopt", description="Passive linear-optics simulator.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        if name in _NEEDS_CIRCUIT:
            s.add_argument("circuit", help="circuit text file")
        if name in {"classical", "coherent", "antibunch", "sample"}:
            s.add_argument("--in", dest="inp", help="complex amplitudes re+imi,...")
        if name == "fock":
            s.add_argument("--in", dest="inp", help="occupations n0,n1,...")
        if name in {"single-photon", "antibunch"}:
            s.add_argument("--in-mode", type=int)
        if name == "antibunch":
            s.add_argument("--pair", default="0,1", help="detector pair i,j")
        if name in {"hom", "sample"}:
            s.add_argument("--grid", help="start:stop:steps")
        if name == "sample":
            s.add_argument("--frames", type=int, default=10000)
            s.add_argument("--seed", type=int, default=0)
            s.add_argument("--workers", type=int, default=1)
            s.add_argument("--scan-element", type=int)
            s.add_argument("--detector", type=int, default=0)
        if name == "equiv-check":
            s.add_argument("--trials", type=int, default=100)
            s.add_argument("--max-modes", type=int, default=6)
            s.add_argument("--seed", type=int, default=0)
            s.add_argument("--tol", type=float, default=UNITARY_TOL)
        s.add_argument("--out", help="write CSV here instead of stdout")
    return p


def run(argv=None, stdout=None, stderr=None):
    """Run one command; returns the process exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    buf = io.StringIO()
    try:
        args = build_parser().parse_args(argv)
        code = COMMANDS[args.command](args, buf) or EXIT_OK
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except CircuitError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_CIRCUIT
    except (NonUnitaryError, UndefinedParameterError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_NUMERIC
    except LinoptError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        stdout.write(buf.getvalue())
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
