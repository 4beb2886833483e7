"""Command line entry point.

Exit codes: 0 success / PASS, 1 certificate FAIL, 2 input error, 3 resource guard.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

from . import catalysis, locc, protocols
from .catalysis import DEFAULT_DIM_CAP, ResourceLimitError, format_real
from .measures import entanglement_entropy, marginal_entropy, von_neumann_entropy
from .qstate import LayoutError, Party, PureState, State, schmidt
from .stateio import StateFormatError, load_state, state_to_dict
from .states import BUILTINS, builtin

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3

MERGE_ROLES = (("R", "A", "B"), (Party.REFEREE, Party.ALICE, Party.BOB))


class InputError(Exception):
    pass


def _real(x: float) -> str:
    return format_real(float(x))


def _reals(xs) -> str:
    return ", ".join(_real(x) for x in xs)


def load_input(source: str, seed: int | None = None, roles=None) -> State:
    """A named built-in state or a path to a state file."""
    if source in BUILTINS or source == "haar":
        labels, parties = roles if roles else (None, None)
        return builtin(source, labels=labels, parties=parties, seed=seed)
    try:
        return load_state(source)
    except StateFormatError as exc:
        raise InputError(f"{source}: {exc}") from None
    except (ValueError, LayoutError) as exc:
        raise InputError(f"{source}: invalid state: {exc}") from None
    except OSError as exc:
        raise InputError(f"{source}: {exc.strerror or exc}") from None


def _require_pure(state: State, source: str) -> PureState:
    if not isinstance(state, PureState):
        raise InputError(f"{source}: expected a pure state")
    return state


def _party_cuts(state: State) -> list[list[str]]:
    groups: dict[Party, list[str]] = {}
    for s in state.layout:
        groups.setdefault(s.party, []).append(s.label)
    if len(groups) >= 2:
        return list(groups.values())
    return [[l] for l in state.layout.labels]


def _write(out: str | None, text: str) -> None:
    if out:
        Path(out).write_text(text)


def cmd_analyze(args, out) -> int:
    state = load_input(args.inputs[0], args.seed)
    layout = " ".join(f"{s.label}({s.dim},{s.party.value})" for s in state.layout)
    lines = [
        f"layout: {layout}",
        f"kind: {'pure' if isinstance(state, PureState) else 'density'}",
        f"purity: {_real(state.purity())}",
        f"entropy: {_real(von_neumann_entropy(state))}",
    ]
    if len(state.layout) > 1:
        for label in state.layout.labels:
            lines.append(f"marginal_entropy[{label}]: {_real(marginal_entropy(state, [label]))}")
    if isinstance(state, PureState) and len(state.layout) > 1:
        seen = set()
        for left in _party_cuts(state):
            right = [l for l in state.layout.labels if l not in left]
            key = frozenset((frozenset(left), frozenset(right)))
            if key in seen:
                continue
            seen.add(key)
            cut = f"{','.join(left)}|{','.join(right)}"
            lines.append(f"entanglement_entropy[{cut}]: {_real(entanglement_entropy(state, left))}")
            lines.append(f"schmidt_spectrum[{cut}]: {_reals(schmidt(state, left).spectrum)}")
    out("\n".join(lines))
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def _pair(args):
    if len(args.inputs) != 2:
        raise InputError(f"{args.command} needs two states")
    psi = _require_pure(load_input(args.inputs[0], args.seed), args.inputs[0])
    phi = _require_pure(load_input(args.inputs[1], args.seed), args.inputs[1])
    return (
        locc.schmidt_spectrum(psi, _party_cuts(psi)[0]),
        locc.schmidt_spectrum(phi, _party_cuts(phi)[0]),
    )


def cmd_convert(args, out) -> int:
    p, q = _pair(args)
    report = locc.nielsen_convertible(p, q)
    lines = [
        f"psi_spectrum: {_reals(p)}",
        f"phi_spectrum: {_reals(q)}",
        f"direct: {str(report.direct).lower()}",
        f"violated_index: {report.violated_index if report.violated_index is not None else 'none'}",
    ]
    out("\n".join(lines))
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_find_catalyst(args, out) -> int:
    p, q = _pair(args)
    found = locc.catalyst_search(p, q, args.catalyst_dim, args.grid_steps)
    lines = [
        f"catalyst_dim: {args.catalyst_dim}",
        f"grid_steps: {args.grid_steps}",
        f"catalyst: {_reals(found) if found is not None else 'none'}",
    ]
    out("\n".join(lines))
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def _rho_phi(args):
    if len(args.inputs) != 2:
        raise InputError(f"{args.command} needs a source state and a target state")
    rho = load_input(args.inputs[0], args.seed)
    phi = _require_pure(load_input(args.inputs[1], args.seed), args.inputs[1])
    if rho.layout.dims != phi.layout.dims:
        raise InputError(f"source dims {rho.layout.dims} differ from target dims {phi.layout.dims}")
    return rho, phi


def _guard(d: int, n: int, cap: int) -> None:
    required = catalysis.joint_dimension(d, n)
    if required > cap:
        raise ResourceLimitError(required, cap)


def cmd_simulate(args, out) -> int:
    rho, phi = _rho_phi(args)
    n, eps = args.n[0], args.epsilon[0]
    _guard(rho.layout.total_dim, n, args.dim_cap)
    gamma = catalysis.make_synthetic_gamma(phi, n, eps)
    construction = catalysis.build_catalyst(rho, gamma, n, epsilon=eps, target=phi)
    report = catalysis.run_protocol(construction, dim_cap=args.dim_cap)
    passed = catalysis.certify_decoupling(report)
    fields = {
        "n": report.n,
        "epsilon": report.epsilon,
        "catalyst_dim": report.tau.layout.total_dim,
        "output_error": report.output_error,
        "catalyst_deviation": report.catalyst_deviation,
        "decoupling_error": report.decoupling_error,
        "ideal_decoupling_error": report.ideal_decoupling_error,
        "output_fidelity": report.output_fidelity,
        "largest_schmidt": report.largest_schmidt,
        "epsilon_bound": report.epsilon_bound,
        "decoupling_bound": report.decoupling_bound,
    }
    lines = [f"{k}: {v if isinstance(v, int) else _real(v)}" for k, v in fields.items()]
    lines.append(f"certificate: {'PASS' if passed else 'FAIL'}")
    out("\n".join(lines))
    if args.out:
        doc = dict(fields, passed=passed, final_joint=state_to_dict(report.final_joint))
        _write(args.out, json.dumps(doc, indent=1) + "\n")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_sweep(args, out) -> int:
    rho, phi = _rho_phi(args)
    for n in args.n:
        _guard(rho.layout.total_dim, n, args.dim_cap)
    points = list(itertools.product(args.n, args.epsilon))
    reports = catalysis.sweep(rho, phi, points, dim_cap=args.dim_cap, workers=args.workers)
    table = catalysis.format_table(reports)
    out(table.rstrip("\n"))
    _write(args.out, table)
    return EXIT_OK if all(catalysis.certify_decoupling(r) for r in reports) else EXIT_FAIL


def _ledger_lines(ledger: protocols.ResourceLedger) -> list[str]:
    return [
        f"conditional_entropy: {_real(ledger.conditional_entropy)}",
        f"case: {ledger.case.value}",
        f"resource_entropy: {_real(ledger.resource_entropy)}",
        f"resource_spectrum: {_reals(ledger.resource_spectrum)}",
        f"direction: {ledger.direction.value if ledger.direction else 'none'}",
    ]


def cmd_merge_ledger(args, out) -> int:
    psi = _require_pure(load_input(args.inputs[0], args.seed, roles=MERGE_ROLES), args.inputs[0])
    ledger = protocols.merging_ledger(psi)
    ok = protocols.merging_optimality_audit(psi, ledger)
    lines = _ledger_lines(ledger) + [f"audit: {'PASS' if ok else 'FAIL'}"]
    out("\n".join(lines))
    _write(args.out, ledger.to_json() + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_distill_ledger(args, out) -> int:
    psi = _require_pure(load_input(args.inputs[0], args.seed), args.inputs[0])
    ledger = protocols.distillation_ledger(psi)
    ok = protocols.distillation_converse_audit(psi, ledger.resource_entropy)
    lines = _ledger_lines(ledger) + [f"audit: {'PASS' if ok else 'FAIL'}"]
    out("\n".join(lines))
    _write(args.out, ledger.to_json() + "\n")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "analyze": (cmd_analyze, "entropies, Schmidt spectrum and purity of a state"),
    "convert": (cmd_convert, "single-copy LOCC convertibility of two pure states"),
    "find-catalyst": (cmd_find_catalyst, "grid search for an enabling catalyst spectrum"),
    "simulate": (cmd_simulate, "run the catalytic protocol once and certify it"),
    "sweep": (cmd_sweep, "run the protocol over n / epsilon values and print a table"),
    "merge-ledger": (cmd_merge_ledger, "entanglement ledger for merging A into B"),
    "distill-ledger": (cmd_distill_ledger, "assisted distillation ledger"),
}


def _list(kind):
    def parse(text: str):
        try:
            return [kind(x) for x in text.split(",") if x.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected comma-separated {kind.__name__} values, got {text!r}")
    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("inputs", nargs="+", help="state files or built-in names: " + ", ".join(sorted(BUILTINS) + ["haar"]))
    common.add_argument("--n", type=_list(int), default=[2], help="number of copies (comma list for sweep)")
    common.add_argument("--epsilon", type=_list(float), default=[1e-2], help="target accuracy (comma list for sweep)")
    common.add_argument("--catalyst-dim", type=int, default=2)
    common.add_argument("--grid-steps", type=int, default=100)
    common.add_argument("--dim-cap", type=int, default=DEFAULT_DIM_CAP)
    common.add_argument("--out", default=None, help="also write the result to this file")
    common.add_argument("--seed", type=int, default=0, help="seed for the 'haar' built-in state")
    common.add_argument("--workers", type=int, default=None, help="process pool size for sweep")

    parser = argparse.ArgumentParser(prog="catalocc", description="Catalytic entanglement transformations at desk scale.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def main(argv=None, out=print) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    handler = COMMANDS[args.command][0]
    try:
        return handler(args, out)
    except ResourceLimitError as exc:
        print(f"error: resource guard: required dimension {exc.required} exceeds allowed {exc.allowed}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InputError, KeyError) as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, LayoutError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
