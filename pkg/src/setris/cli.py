"""Command-line front end: an interactive REPL plus batch and one-shot runs.

Statements are separated by ``;``.  A statement is either a formula, which is
posted and run according to ``--mode``, or a command:

    :solve F      post F, print the first solution and the residual store
    :all F        post F, enumerate solutions (up to --max-solutions)
    :check F      post F, print true or false
    :expand T     extensional form of a RIS term under the current store
    :admissible F print the admissibility verdict of F (nothing is posted)
    :store        print the last solution again
    :reset        forget every posted formula and variable name
    :help, :quit

Formulas that succeed stay in the session and are solved again together with
each later statement, so names carry over but earlier answers are not fixed.  Exit status: 0 ok, 1 failure, 2 error or resource limit.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from .admissibility import check_admissible, shape_problems
from .cache import DEFAULT_CAPACITY
from .formula import conj
from .intsolver import DEFAULT_BOUNDS
from .parser import ParseError, Parser, split_statements
from .ris import NotExpandable, UnsafeRis
from .render import Namer, render_term, solution_json, term_json
from .solver import DEFAULT_STEP_LIMIT, ResourceLimit, Solver, Status
from .terms import ArithError, MalformedRis

OK, FAILURE, ERROR = 0, 1, 2
_COMMANDS = ("solve", "all", "check", "expand", "admissible", "store", "reset", "help", "quit")


@dataclass
class Options:
    mode: str = "solve"
    max_solutions: int = 100
    step_limit: int = DEFAULT_STEP_LIMIT
    int_bounds: tuple = DEFAULT_BOUNDS
    cache_size: int = DEFAULT_CAPACITY
    admissibility: str = "warn"
    dedup: bool = False
    json: bool = False


class Rejected(Exception):
    """A formula refused by strict admissibility checking."""


@dataclass
class Session:
    options: Options = field(default_factory=Options)
    out: object = None
    err: object = None

    def __post_init__(self):
        self.out = self.out or sys.stdout
        self.err = self.err or sys.stderr
        self.reset()

    def reset(self):
        self.names: dict = {}
        self.history: list = []
        self.last = None

    # ------------------------------------------------------------ plumbing
    def _solver(self, *extra) -> Solver:
        o = self.options
        s = Solver(o.step_limit, tuple(o.int_bounds), o.cache_size)
        s.add(*self.history, *extra)
        return s

    def _say(self, text=""):
        print(text, file=self.out)

    def _emit(self, obj):
        print(json.dumps(obj, sort_keys=False), file=self.out)

    def _admit(self, f):
        mode = self.options.admissibility
        if mode == "off":
            return
        problems = []
        bad = shape_problems(f)
        if bad:
            namer = Namer()
            problems += [f"control term or pattern outside the admissible shapes: "
                         f"{render_term(r, namer)}" for r in bad]
        verdict = check_admissible(conj(*self.history, f))
        if not verdict:
            problems.append(str(verdict))
        if not problems:
            return
        if mode == "strict":
            raise Rejected("; ".join(problems))
        for p in problems:
            print(f"warning: {p}", file=self.err)

    # ------------------------------------------------------------ statements
    def run_text(self, text: str) -> int:
        code = OK
        for stmt in split_statements(text) if text.strip() else []:
            code = max(code, self.run(stmt))
            if stmt.strip() in (":quit", ":q"):
                break
        return code

    def run(self, stmt: str) -> int:
        stmt = stmt.strip()
        cmd, arg = self.options.mode, stmt
        if stmt.startswith(":"):
            head, _, arg = stmt[1:].partition(" ")
            cmd, arg = head.strip(), arg.strip()
            if cmd == "q":
                cmd = "quit"
        if cmd not in _COMMANDS:
            return self._error(cmd, f"unknown command :{cmd}")
        try:
            return getattr(self, f"_cmd_{cmd}")(arg)
        except ParseError as e:
            return self._error(cmd, f"syntax error: {e}")
        except Rejected as e:
            return self._error(cmd, f"rejected (strict admissibility): {e}")
        except ResourceLimit as e:
            return self._error(cmd, f"ResourceLimit: {e}", status="resource_limit")
        except (UnsafeRis, NotExpandable, ArithError, MalformedRis) as e:
            return self._error(cmd, f"{type(e).__name__}: {e}")
        except RecursionError:
            return self._error(cmd, "ResourceLimit: recursion depth exceeded",
                               status="resource_limit")

    def _error(self, cmd, msg, status="error") -> int:
        if self.options.json:
            self._emit({"command": cmd, "status": status, "message": msg})
        else:
            print(f"error in :{cmd}: {msg}", file=self.err)
        return ERROR

    def _parse(self, text):
        if not text:
            raise ParseError("missing formula")
        return Parser(self.names).formula(text)

    def _print_solution(self, sol, cmd):
        if self.options.json:
            self._emit({"command": cmd, "status": "success", **solution_json(sol)})
        else:
            self._say(str(sol))

    def _failure(self, cmd) -> int:
        if self.options.json:
            self._emit({"command": cmd, "status": "failure"})
        else:
            self._say("Failure")
        return FAILURE

    def _limit(self, cmd) -> int:
        return self._error(cmd, f"ResourceLimit: step limit {self.options.step_limit} "
                                f"exceeded", status="resource_limit")

    # ------------------------------------------------------------ commands
    def _cmd_solve(self, arg) -> int:
        f = self._parse(arg)
        self._admit(f)
        out = self._solver(f).solve()
        if out.status is Status.RESOURCE_LIMIT:
            return self._limit("solve")
        if not out:
            return self._failure("solve")
        self.history.append(f)
        self.last = out.solution
        self._print_solution(out.solution, "solve")
        return OK

    def _cmd_all(self, arg) -> int:
        f = self._parse(arg)
        self._admit(f)
        o = self.options
        sols = []
        try:
            for sol in self._solver(f).solutions(o.max_solutions, o.dedup):
                sols.append(sol)
                if not o.json and len(sols) > 1:
                    self._say()
                self._print_solution(sol, "all")
        except ResourceLimit:
            if sols:
                self.history.append(f)
                self.last = sols[0]
            return self._limit("all")
        if not sols:
            return self._failure("all")
        self.history.append(f)
        self.last = sols[0]
        if not o.json:
            more = " (limit reached)" if len(sols) == o.max_solutions else ""
            self._say(f"-- {len(sols)} solution{'s' if len(sols) != 1 else ''}{more}")
        return OK

    def _cmd_check(self, arg) -> int:
        f = self._parse(arg)
        self._admit(f)
        s = self._solver(f)
        ok = s.check()
        if ok:
            self.history.append(f)
            self.last = s._solution()
        if self.options.json:
            self._emit({"command": "check", "status": "success" if ok else "failure",
                        "result": ok})
        else:
            self._say("true" if ok else "false")
        return OK if ok else FAILURE

    def _cmd_expand(self, arg) -> int:
        if not arg:
            raise ParseError("missing term")
        t = Parser(self.names).term(arg)
        s = self._solver()
        if not s.check():
            return self._failure("expand")
        value = s.expand(t)
        namer = Namer()
        if self.options.json:
            self._emit({"command": "expand", "status": "success", "value": term_json(value, namer)})
        else:
            self._say(render_term(value, namer))
        return OK

    def _cmd_admissible(self, arg) -> int:
        f = self._parse(arg)
        verdict = check_admissible(f)
        shapes = shape_problems(f)
        if self.options.json:
            self._emit({"command": "admissible", "status": "success",
                        "admissible": bool(verdict), "verdict": str(verdict),
                        "shape_ok": not shapes})
        else:
            self._say(str(verdict))
            namer = Namer()
            for r in shapes:
                self._say(f"shape: {render_term(r, namer)} has a non-admissible control "
                          f"term or pattern")
        return OK

    def _cmd_store(self, arg) -> int:
        if self.last is None:
            if self.options.json:
                self._emit({"command": "store", "status": "success", "bindings": {},
                            "residue": [], "domains": {}})
            else:
                self._say("Store: (empty)")
            return OK
        self._print_solution(self.last, "store")
        return OK

    def _cmd_reset(self, arg) -> int:
        self.reset()
        return OK

    def _cmd_help(self, arg) -> int:
        self._say(__doc__.strip())
        return OK

    def _cmd_quit(self, arg) -> int:
        return OK


# ---------------------------------------------------------------- entry point
def _arg_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="setris",
                                description="Solve constraints over finite and intensional sets.")
    p.add_argument("formula", nargs="?", help="statements to run (default: REPL or stdin)")
    p.add_argument("--mode", choices=("check", "solve", "all"), default="solve",
                   help="what to do with a bare formula")
    p.add_argument("--max-solutions", type=int, default=100, metavar="N")
    p.add_argument("--step-limit", type=int, default=DEFAULT_STEP_LIMIT, metavar="N")
    p.add_argument("--int-bounds", type=int, nargs=2, default=DEFAULT_BOUNDS,
                   metavar=("LO", "HI"))
    p.add_argument("--cache-size", type=int, default=DEFAULT_CAPACITY, metavar="N")
    p.add_argument("--admissibility", choices=("warn", "strict", "off"), default="warn")
    p.add_argument("--dedup", action="store_true", help="drop repeated solutions")
    p.add_argument("--json", action="store_true", help="one JSON object per line")
    p.add_argument("--file", metavar="PATH", help="batch file of ;-separated statements")
    return p


def _repl(session: Session) -> int:
    code, buf = OK, ""
    while True:
        try:
            line = input("setris> " if not buf else "   ...> ")
        except EOFError:
            print()
            break
        buf += line + "\n"
        try:
            stmts = split_statements(buf) if buf.strip() else []
        except ParseError as e:
            print(f"error: syntax error: {e}", file=session.err)
            buf, code = "", ERROR
            continue
        if not stmts:
            buf = ""
            continue
        # wait for a terminating ';' unless the line is a bare command
        if not buf.rstrip().endswith(";") and not buf.lstrip().startswith(":"):
            continue
        buf = ""
        for stmt in stmts:
            code = session.run(stmt)
            if stmt in (":quit", ":q"):
                return code
    return code


def main(argv=None) -> int:
    args = _arg_parser().parse_args(argv)
    if args.max_solutions < 1 or args.step_limit < 1 or args.cache_size < 0:
        print("error: limits must be positive (cache size may be 0)", file=sys.stderr)
        return ERROR
    if args.int_bounds[0] > args.int_bounds[1]:
        print("error: --int-bounds needs LO <= HI", file=sys.stderr)
        return ERROR
    opts = Options(args.mode, args.max_solutions, args.step_limit, tuple(args.int_bounds),
                   args.cache_size, args.admissibility, args.dedup, args.json)
    session = Session(opts)
    try:
        if args.file:
            with open(args.file, encoding="utf-8") as fh:
                code = session.run_text(fh.read())
            if args.formula:
                code = max(code, session.run_text(args.formula))
            return code
        if args.formula:
            return session.run_text(args.formula)
        if sys.stdin.isatty():
            return _repl(session)
        return session.run_text(sys.stdin.read())
    except ParseError as e:
        print(f"error: syntax error: {e}", file=sys.stderr)
        return ERROR
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
