"""``ordmat`` command-line front end.

Every subcommand reads JSON (a file path or ``-`` for stdin), writes one
JSON document to stdout and exits 0 on success, 1 on a mathematical
failure and 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Sequence

from . import gen
from .autom import make_automorphism, parse_automorphism_spec
from .decompose import (decompose, default_probe_units, default_probes, parse_decomposition,
                        verify_decomposition)
from .errors import (ConfigurationError, DescriptorMismatch, DimensionMismatch, InputError,
                     MalformedWord, OrdmatError)
from .involution import block_diagonalize, block_diagonalize_monomial, canonical_conjugator, idempotent_system
from .matgroup import (MEMBER_CLASSES, eval_word, infer_word_shape, is_member, parse_chain, parse_matrix,
                       parse_word, verify_equiv_chain, word_det_sign)
from .ring import RingDescriptor, check_order_axioms, parse_elem, parse_ring

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

INPUT_ERRORS = (InputError, ConfigurationError, DescriptorMismatch, DimensionMismatch, MalformedWord)

CLASS_ALIASES = {
    "gn": "Gn", "g_n": "Gn",
    "gamma_n": "Gamma_n", "gamman": "Gamma_n", "gamma": "Gamma_n",
    "dn": "Dn", "d_n": "Dn",
    "block_scalar_involution": "BlockScalarInvolution", "q": "BlockScalarInvolution",
}


class UsageError(Exception):
    pass


def _flat(obj) -> bool:
    return isinstance(obj, list) and all(not isinstance(x, (dict, list)) or
                                         (isinstance(x, list) and _flat(x)) for x in obj)


def to_text(obj, depth: int = 0) -> str:
    """JSON with nested scalar lists (matrix rows, ring elements) kept on one line."""
    pad, inner = "  " * depth, "  " * (depth + 1)
    if isinstance(obj, dict) and obj:
        short = json.dumps(obj)
        if len(short) <= 72 and all(not isinstance(v, (dict, list)) or _flat(v) for v in obj.values()):
            return short
        body = ",\n".join(f"{inner}{json.dumps(k)}: {to_text(v, depth + 1)}" for k, v in obj.items())
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(obj, list) and obj and not _flat(obj):
        body = ",\n".join(inner + to_text(v, depth + 1) for v in obj)
        return "[\n" + body + "\n" + pad + "]"
    if isinstance(obj, list) and obj and isinstance(obj[0], list):
        rows = ",\n".join(inner + json.dumps(v) for v in obj)
        return "[\n" + rows + "\n" + pad + "]"
    return json.dumps(obj)


def _read_json(path: str | None):
    if path is None:
        return None
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc.msg}",
                         witness={"line": exc.lineno, "column": exc.colno, "position": exc.pos}) from exc


def _ring(args, data=None) -> RingDescriptor:
    if getattr(args, "ring", None):
        return parse_ring(args.ring)
    if isinstance(data, dict) and "ring" in data:
        return parse_ring(data["ring"])
    return RingDescriptor(1)


def _words_payload(data):
    """A bare list of letters or an object with 'word' / 'words'."""
    if isinstance(data, list):
        return data, {}
    if isinstance(data, dict):
        if "word" in data:
            return data["word"], data
        if "words" in data:
            return data["words"], data
    raise InputError("expected a word (list of letters) or an object with 'word'")


def cmd_check_axioms(args) -> tuple[int, dict]:
    data = _read_json(args.input)
    ring = _ring(args, data)
    report = check_order_axioms(ring, samples=args.samples, seed=args.seed)
    return (EXIT_OK if report.passed else EXIT_FAIL), {"ring": ring.to_json(), **report.to_json()}


def cmd_eval(args) -> tuple[int, dict]:
    data = _read_json(args.input)
    letters, meta = _words_payload(data)
    n_guess, k_guess = infer_word_shape(letters)
    n = args.n or meta.get("n") or n_guess
    if n is None:
        raise InputError("cannot infer the dimension; pass --n")
    ring = parse_ring(args.ring) if args.ring else (parse_ring(meta["ring"]) if "ring" in meta
                                                     else RingDescriptor(k_guess or 1))
    word = parse_word(letters, int(n), ring)
    mat = eval_word(word)
    return EXIT_OK, {"matrix": mat.to_json(), "det": mat.det().to_json(),
                     "det_sign": word_det_sign(word).to_json()}


def cmd_membership(args) -> tuple[int, dict]:
    data = _read_json(args.input)
    cls = CLASS_ALIASES.get(args.cls.lower(), args.cls)
    if cls not in MEMBER_CLASSES:
        raise UsageError(f"unknown class {args.cls!r}")
    mat = parse_matrix(data, parse_ring(args.ring).k if args.ring else None)
    return EXIT_OK, {"class": cls, "member": is_member(mat, cls)}


def cmd_block_diagonalize(args) -> tuple[int, dict]:
    data = _read_json(args.input)
    mat = parse_matrix(data, parse_ring(args.ring).k if args.ring else None)
    form = block_diagonalize(mat)
    fast = block_diagonalize_monomial(mat)
    agree = canonical_conjugator(form.conjugator, mat) == fast.conjugator
    out = {"conjugator": form.conjugator.to_json(), "result": form.result.to_json(),
           "block_sizes": list(form.block_sizes),
           "idempotents": [e.to_json() for e in idempotent_system(mat).elements],
           "canonical_conjugator": fast.conjugator.to_json(), "routes_agree": agree}
    return (EXIT_OK if agree else EXIT_FAIL), out


def _probe_words(args, n: int, ring: RingDescriptor):
    if args.probes in (None, "default"):
        return default_probes(n, ring, args.seed)
    data = _read_json(args.probes)
    if not isinstance(data, list):
        raise InputError("probe file must hold a list of words")
    return [parse_word(w, n, ring) for w in data]


def cmd_decompose(args) -> tuple[int, dict]:
    data = _read_json(args.input)
    ring = _ring(args, data)
    spec = parse_automorphism_spec(data, ring, args.n)
    phi = make_automorphism(spec)
    units = None
    if args.units:
        units = [parse_elem(u, ring.k) for u in json.loads(args.units)]
    dec = decompose(phi, units or default_probe_units(ring), _probe_words(args, spec.n, ring), args.seed)
    status = EXIT_OK if dec.homothety is not None else EXIT_FAIL
    return status, dec.to_json()


def cmd_verify(args) -> tuple[int, dict]:
    data = _read_json(args.input)
    if not isinstance(data, dict):
        raise InputError("verify input must be a JSON object")
    nested = data.get("automorphism")
    ring = _ring(args, data if "ring" in data or not isinstance(nested, dict) else nested)
    if "chain" in data:
        n = args.n or data.get("n")
        if n is None:
            raise InputError("chain verification needs 'n'")
        ok = verify_equiv_chain(parse_chain(data["chain"], int(n), ring))
        return (EXIT_OK if ok else EXIT_FAIL), {"kind": "chain", "passed": ok}
    try:
        spec = parse_automorphism_spec(data["automorphism"], ring, args.n or data.get("n"))
        dec = parse_decomposition(data["decomposition"], ring)
    except KeyError as exc:
        raise InputError(f"verify input needs 'automorphism' and 'decomposition' (missing {exc})") from exc
    phi = make_automorphism(spec)
    words = data.get("words", "default")
    if words == "default":
        words = default_probes(spec.n, ring, args.seed)
    else:
        words = [parse_word(w, spec.n, ring) for w in words]
    report = verify_decomposition(phi, dec, words)
    out = {"kind": "decomposition", **report.to_json()}
    if not args.all_words:
        out["words"] = [w for w in report.results if not w["pass"]][:1]
    return (EXIT_OK if report.passed else EXIT_FAIL), out


def cmd_gen(args) -> tuple[int, dict]:
    ring = parse_ring(args.ring or "q")
    rng = random.Random(args.seed)
    if args.n < 1:
        raise UsageError("--n must be positive")
    if args.kind == "gamma_element":
        return EXIT_OK, gen.gamma_element(args.n, ring, rng).to_json()
    if args.kind == "involution":
        return EXIT_OK, gen.involution(args.n, ring, rng, args.pairs).to_json()
    factors = [f.strip() for f in args.factors.split(",") if f.strip()]
    return EXIT_OK, gen.automorphism(args.n, ring, rng, factors).to_json()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ordmat", description="Exact nonnegative matrix groups over Q^k.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, needs_input=True):
        sp = sub.add_parser(name, help=help_text)
        if needs_input:
            sp.add_argument("input", help="JSON file, or - for stdin")
        sp.add_argument("--ring", help="q, q2, ... (overrides any ring in the input)")
        sp.add_argument("--seed", type=int, default=0)
        sp.set_defaults(func=fn)
        return sp

    sp = add("check-axioms", cmd_check_axioms, "sample the order axioms of a ring", needs_input=False)
    sp.add_argument("input", nargs="?", help="optional ring JSON")
    sp.add_argument("--samples", type=int, default=1000)

    sp = add("eval", cmd_eval, "evaluate a generator word")
    sp.add_argument("--n", type=int)

    sp = add("membership", cmd_membership, "test membership in Gn, Gamma_n, Dn or the block involutions")
    sp.add_argument("--class", dest="cls", required=True,
                    help="gn | gamma_n | dn | block_scalar_involution")

    add("block-diagonalize", cmd_block_diagonalize, "conjugate an involution of Gamma_n to 2x2/1x1 blocks")

    sp = add("decompose", cmd_decompose, "recover M, c and the homothety of an automorphism")
    sp.add_argument("--n", type=int)
    sp.add_argument("--probes", default="default", help="'default' or a JSON file of words")
    sp.add_argument("--units", help="JSON list of probe units, e.g. '[\"1/2\", \"3\"]'")

    sp = add("verify", cmd_verify, "check a decomposition on words, or an equivalence chain")
    sp.add_argument("--n", type=int)
    sp.add_argument("--all-words", action="store_true", help="list every word, not just the first failure")

    sp = add("gen", cmd_gen, "seeded random elements, involutions and automorphisms", needs_input=False)
    sp.add_argument("--kind", required=True, choices=["gamma_element", "involution", "automorphism"])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--pairs", type=int, help="number of 2-cycles for --kind involution")
    sp.add_argument("--factors", default="inner,ring_map,homothety",
                    help="comma-separated factor kinds, outermost first")
    return p


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        status, payload = args.func(args)
    except UsageError as exc:
        status, payload = EXIT_INPUT, {"error": "UsageError", "message": str(exc)}
    except INPUT_ERRORS as exc:
        status, payload = EXIT_INPUT, exc.to_dict()
    except OrdmatError as exc:
        status, payload = EXIT_FAIL, exc.to_dict()
    except (KeyError, TypeError, ValueError) as exc:
        status, payload = EXIT_INPUT, {"error": "InputError", "message": f"unexpected input shape: {exc!r}"}
    out.write(to_text(payload) + "\n")
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
