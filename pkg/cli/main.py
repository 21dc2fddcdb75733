from __future__ import annotations

import argparse
import sys
import time

from omegaconf import DictConfig

from logic.formula import StateFormula, pretty_print
from logic.parser import parse_formula
from logic.transs import translate_structural
from mc.mc_structure import check_structure
from mc.mc_tree import TreeChecker
from qctl_utils.config import load_config
from qctl_utils.errors import QctlError, ResourceLimitExceeded
from qctl_utils.logger import get_logger, log_scalar, logger
from structures.kripke import CompoundKripkeStructure, LocalAlphabets, parse_model

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

SEMANTICS = ('structure', 'tree')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='qctl', description='model checking of QCTL* with imperfect information')
    parser.add_argument('--config', help='YAML configuration file (default configs/checker_config.yaml)')
    parser.add_argument('--max-nta-states', type=int, help='override resources.max_nta_states')
    parser.add_argument('-v', '--verbose', action='store_true', help='log construction steps')
    commands = parser.add_subparsers(dest='command', required=True)

    def add_query_arguments(p: argparse.ArgumentParser) -> None:
        p.add_argument('--model', required=True, help='model file')
        p.add_argument('--state', required=True, help='initial state')
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument('--formula', help='formula text')
        group.add_argument('--formula-file', help='file holding the formula')

    check = commands.add_parser('check', help='check a formula at a state of a model')
    add_query_arguments(check)
    check.add_argument('--semantics', default='structure', help=f'one of {list(SEMANTICS)}')
    check.add_argument('--dump-automata', metavar='DIR', help='write every intermediate automaton to DIR')

    translate = commands.add_parser('translate', help='rewrite observation quantifiers into plain ones')
    group = translate.add_mutually_exclusive_group(required=True)
    group.add_argument('--formula', help='formula text')
    group.add_argument('--formula-file', help='file holding the formula')
    source = translate.add_mutually_exclusive_group(required=True)
    source.add_argument('--locals', action='append', metavar='"l1 l2 ..."',
                        help='one local alphabet per flag, in coordinate order')
    source.add_argument('--model', help='take the local alphabets from a model file')

    dump = commands.add_parser('dump-automata', help='build the tree automata of a formula and write them out')
    add_query_arguments(dump)
    dump.add_argument('--dir', required=True, help='output directory')

    selftest = commands.add_parser('selftest', help='run the acceptance suites')
    selftest.add_argument('suites', nargs='*', help='suites to run (all by default)')
    return parser


def _read(path: str) -> str:
    with open(path) as f:
        return f.read()


def load_model(path: str) -> CompoundKripkeStructure:
    return parse_model(_read(path))


def load_formula(args: argparse.Namespace) -> StateFormula:
    return parse_formula(args.formula if args.formula is not None else _read(args.formula_file))


def _report(verdict: bool, stats: dict, cfg: DictConfig) -> int:
    print(f'RESULT: {"TRUE" if verdict else "FALSE"}')
    if cfg.logger.show_stats:
        for key, value in stats.items():
            log_scalar(key, value)
    return EXIT_TRUE if verdict else EXIT_FALSE


def cmd_check(args: argparse.Namespace, cfg: DictConfig) -> int:
    if args.semantics not in SEMANTICS:
        raise NotImplementedError(f'Available semantics are {list(SEMANTICS)}, got {args.semantics}')
    K = load_model(args.model)
    f = load_formula(args)
    start = time.time()
    if args.semantics == 'structure':
        verdict = check_structure(K, args.state, f)
        return _report(verdict, {'semantics': 'structure', 'wall_time': time.time() - start}, cfg)
    K.tuple_of(args.state)
    checker = TreeChecker(K, f, cfg, args.dump_automata)
    verdict = checker.check(args.state)
    return _report(verdict, {'semantics': 'tree', **checker.stats}, cfg)


def cmd_translate(args: argparse.Namespace, cfg: DictConfig) -> int:
    f = load_formula(args)
    if args.model is not None:
        locals = load_model(args.model).locals
    else:
        locals = LocalAlphabets(tuple(tuple(alphabet.split()) for alphabet in args.locals))
    print(pretty_print(translate_structural(f, locals)))
    return EXIT_TRUE


def cmd_dump_automata(args: argparse.Namespace, cfg: DictConfig) -> int:
    K = load_model(args.model)
    K.tuple_of(args.state)
    checker = TreeChecker(K, load_formula(args), cfg, args.dir)
    checker.check(args.state)
    logger.info(f'{checker.stats["automata"]} automata written to {args.dir}')
    return EXIT_TRUE


def cmd_selftest(args: argparse.Namespace, cfg: DictConfig) -> int:
    from cli.selftest import run_suites

    return EXIT_TRUE if run_suites(list(args.suites), cfg) else EXIT_FALSE


COMMANDS = {
    'check': cmd_check,
    'translate': cmd_translate,
    'dump-automata': cmd_dump_automata,
    'selftest': cmd_selftest,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.max_nta_states is not None:
            cfg.resources.max_nta_states = args.max_nta_states
        get_logger(cfg.logger, args.verbose)
        sys.setrecursionlimit(max(sys.getrecursionlimit(), cfg.resources.recursion_limit))
        return COMMANDS[args.command](args, cfg)
    except ResourceLimitExceeded as e:
        logger.error(str(e))
        return EXIT_RESOURCE
    except (QctlError, NotImplementedError, ValueError, OSError) as e:
        logger.error(str(e))
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
