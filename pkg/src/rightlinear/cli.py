"""Command-line front end.

Exit codes: 0 positive verdict, 1 negative verdict (with witness), 2 rejected
or malformed input, 3 internal cap exceeded, 4 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .automata import parse_system, solve_system
from .bridge import (
    expr_to_coeffs, omega_to_expr, parse_omega, parse_regex, regex_bullet,
    regex_text, solve_by_elimination,
)
from .calculus import (
    ProofFormatError, Sequent, deserialize, parse_sequent, serialize,
)
from .checker import (
    DEFAULT_STATE_CAP, MALFORMED, PROGRESSING, CapExceeded, check_progress,
)
from .expr import One, ParseError, letters, parse, to_text
from .invariant import DisciplineError, verify_invariant
from .prover import Refuted, Rejected, prove
from .puzzle import solve
from .words import FiniteWord, parse_word

OK, NEGATIVE, REJECTED, CAP, USAGE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class _Out:
    """Collects one structured document or prints human-readable lines."""

    def __init__(self, as_json: bool, stdout, stderr):
        self.as_json = as_json
        self.stdout, self.stderr = stdout, stderr
        self.doc: dict = {}

    def say(self, text: str, **fields) -> None:
        self.doc.update(fields)
        if not self.as_json:
            print(text, file=self.stdout)

    def warn(self, text: str) -> None:
        print(text, file=self.stderr)

    def finish(self, code: int) -> int:
        if self.as_json:
            self.doc.setdefault("exit", code)
            print(json.dumps(self.doc), file=self.stdout)
        return code


def _alphabet(args) -> set[str] | None:
    if args.alphabet is None:
        return None
    alpha = set(args.alphabet.replace(",", ""))
    if not alpha or not all(c.isalpha() and c.islower() and len(c) == 1 for c in alpha):
        raise UsageError("alphabet must be a nonempty set of lowercase letters")
    return alpha


def _sequent(parts: Sequence[str], alphabet) -> Sequent:
    text = " ".join(parts)
    if "|-" not in text:
        raise UsageError("expected '<expr> |- <expr>, ...'")
    return parse_sequent(text, alphabet)


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _cmd_member(args, out: _Out) -> int:
    alpha = _alphabet(args)
    w = parse_word(args.word)
    if alpha is not None:
        used = set(w.letters) if isinstance(w, FiniteWord) else set(w.prefix + w.period)
        if not used <= alpha:
            raise ParseError(f"word uses letters outside the alphabet: {sorted(used - alpha)}")
    e = parse(args.expr, alpha, closed=True)
    play = solve(w, e)
    if play is None:
        out.say(f"{w} is not in {to_text(e)}", member=False, word=str(w))
        return NEGATIVE
    moves = [[i, to_text(f)] for i, f in play.positions]
    out.say(f"{w} is in {to_text(e)}", member=True, word=str(w), play=moves,
            loop_start=play.loop_start)
    return OK


def _proof_alphabet(s: Sequent, alpha) -> set[str]:
    if alpha is not None:
        return alpha
    out: set[str] = set()
    for f in s.formulas():
        out |= letters(f)
    return out


def _cmd_prove(args, out: _Out) -> int:
    alpha = _alphabet(args)
    s = _sequent(args.sequent, alpha)
    result = prove(s, args.cap)
    if isinstance(result, Rejected):
        out.warn(f"rejected: {result.reason}")
        out.doc.update(verdict="rejected", reason=result.reason)
        return REJECTED
    if isinstance(result, Refuted):
        out.say(f"refuted by {result.word}", verdict="refuted", word=str(result.word))
        return NEGATIVE
    text = serialize(result.proof, _proof_alphabet(s, alpha))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
        out.say(f"proved; {len(result.proof)} nodes written to {args.output}",
                verdict="proved", nodes=len(result.proof), file=args.output)
    elif out.as_json:
        out.doc.update(verdict="proved", nodes=len(result.proof), proof=text)
    else:
        out.stdout.write(text)
    return OK


def _cmd_countermodel(args, out: _Out) -> int:
    alpha = _alphabet(args)
    s = _sequent(args.sequent, alpha)
    result = prove(s, args.cap)
    if isinstance(result, Rejected):
        out.warn(f"rejected: {result.reason}")
        out.doc.update(verdict="rejected", reason=result.reason)
        return REJECTED
    if isinstance(result, Refuted):
        out.say(str(result.word), verdict="countermodel", word=str(result.word))
        return OK
    out.say("no countermodel: the sequent is valid", verdict="valid")
    return NEGATIVE


def _load_proof(path: str, out: _Out):
    try:
        return deserialize(_read(path), validate=False)
    except (ProofFormatError, ParseError) as exc:
        out.warn(f"malformed proof: {exc}")
        out.doc.update(verdict=MALFORMED, reason=str(exc))
        return None


def _cmd_check(args, out: _Out) -> int:
    p = _load_proof(args.proof, out)
    if p is None:
        return REJECTED
    report = check_progress(p, args.cap)
    out.say(report.to_text(), **report.to_dict())
    if report.verdict == MALFORMED:
        return REJECTED
    return OK if report.verdict == PROGRESSING else NEGATIVE


def _cmd_invariant(args, out: _Out) -> int:
    p = _load_proof(args.proof, out)
    if p is None:
        return REJECTED
    try:
        cert = verify_invariant(p)
    except DisciplineError as exc:
        out.warn(f"rejected: {exc}")
        out.doc.update(verdict="rejected", reason=str(exc))
        return REJECTED
    out.say(cert.to_text(), **cert.to_dict())
    return OK if cert.accepted else NEGATIVE


def _cmd_translate(args, out: _Out) -> int:
    alpha = _alphabet(args)
    if args.kind == "regex":
        e = regex_bullet(parse_regex(args.input, alpha), One())
        out.say(to_text(e), expr=to_text(e))
    elif args.kind == "omega":
        e = omega_to_expr(parse_omega(args.input, alpha))
        out.say(to_text(e), expr=to_text(e))
    else:
        c = expr_to_coeffs(parse(args.input, alpha))
        out.say(str(c), coeffs={x: regex_text(r) for x, r in c.coeffs.items()},
                const=regex_text(c.const))
    return OK


def _cmd_solve(args, out: _Out) -> int:
    system = parse_system(_read(args.system))
    closed = solve_by_elimination(system)
    langs = solve_system(system)
    doc = {}
    lines = []
    for x in system.variables:
        words = sorted(langs[x].automaton.words_upto(args.words), key=lambda w: (len(w), w))
        shown = ", ".join(w or "~" for w in words) or "(none)"
        lines.append(f"{x} = {to_text(closed[x])}\n  words up to length {args.words}: {shown}")
        doc[x] = {"expr": to_text(closed[x]), "words": words}
    out.say("\n".join(lines), solutions=doc)
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rightlinear", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON document")
    common.add_argument("--alphabet", help="declared letters, e.g. 'ab'")
    common.add_argument("--cap", type=int, default=DEFAULT_STATE_CAP,
                        help="trace-summary cap for the progress checker")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    m = sub.add_parser("member", parents=[common], help="word membership via the evaluation puzzle")
    m.add_argument("word", help="finite word, '~' for empty, or lasso 'u:v'")
    m.add_argument("expr")
    m.set_defaults(run=_cmd_member)

    for name, fn, text in (("prove", _cmd_prove, "prove a sequent or refute it"),
                           ("countermodel", _cmd_countermodel, "search for a countermodel word")):
        q = sub.add_parser(name, parents=[common], help=text)
        q.add_argument("sequent", nargs="+", help="<expr> |- <expr>, ...")
        if name == "prove":
            q.add_argument("-o", "--output", help="write the proof file here")
        q.set_defaults(run=fn)

    c = sub.add_parser("check", parents=[common], help="check a proof file")
    c.add_argument("proof")
    c.set_defaults(run=_cmd_check)

    t = sub.add_parser("translate", parents=[common], help="regex/omega/coefficient translations")
    t.add_argument("kind", choices=["regex", "omega", "coeffs"])
    t.add_argument("input")
    t.set_defaults(run=_cmd_translate)

    i = sub.add_parser("invariant", parents=[common], help="certify the big-meet invariant of a proof")
    i.add_argument("proof")
    i.set_defaults(run=_cmd_invariant)

    s = sub.add_parser("solve", parents=[common], help="least solutions of an equation system")
    s.add_argument("system")
    s.add_argument("--words", type=int, default=4, help="list solution words up to this length")
    s.set_defaults(run=_cmd_solve)
    return p


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    as_json = argv is not None and "--json" in argv or argv is None and "--json" in sys.argv[1:]
    out = _Out(as_json, stdout, stderr)
    try:
        args = build_parser().parse_args(argv)
        if args.cap <= 0:
            raise UsageError("--cap must be positive")
        return out.finish(args.run(args, out))
    except UsageError as exc:
        out.warn(f"usage error: {exc}")
        out.doc.update(verdict="usage-error", reason=str(exc))
        return out.finish(USAGE)
    except (ParseError, ValueError) as exc:
        out.warn(f"rejected input: {exc}")
        out.doc.update(verdict="rejected", reason=str(exc))
        return out.finish(REJECTED)
    except CapExceeded as exc:
        out.warn(f"cap exceeded: {exc}")
        out.doc.update(verdict="cap-exceeded", reason=str(exc))
        return out.finish(CAP)


def main() -> None:
    sys.exit(run())
