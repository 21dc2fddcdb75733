import logging

import pytest

from cli.corpus import K0_TEXT, K1_TEXT
from cli.main import EXIT_FALSE, EXIT_RESOURCE, EXIT_TRUE, EXIT_USAGE, build_parser, main
from cli.selftest import SUITES, run_suites
from qctl_utils.config import default_config
from qctl_utils.logger import get_logger, log_scalar


@pytest.fixture
def k0_file(tmp_path):
    path = tmp_path / 'k0.cks'
    path.write_text(K0_TEXT)
    return str(path)


def test_check_structure_verdicts(k0_file, capsys):
    code = main(['check', '--model', k0_file, '--state', 'u', '--semantics', 'structure',
                 '--formula', 'exists q^{1}.(q & E X !q)'])
    assert code == EXIT_TRUE
    assert 'RESULT: TRUE' in capsys.readouterr().out
    code = main(['check', '--model', k0_file, '--state', 'u', '--formula', 'exists q^{}.(q & E X !q)'])
    assert code == EXIT_FALSE
    assert 'RESULT: FALSE' in capsys.readouterr().out


def test_check_tree_semantics(tmp_path, capsys):
    model = tmp_path / 'k1.cks'
    model.write_text(K1_TEXT)
    formula = tmp_path / 'root_only.qctl'
    formula.write_text('-- label the root alone\nexists q^{1}. (q & A X A G !q)\n')
    args = ['check', '--model', str(model), '--state', 'w', '--formula-file', str(formula)]
    assert main(args + ['--semantics', 'tree']) == EXIT_TRUE
    assert main(args + ['--semantics', 'structure']) == EXIT_FALSE


def test_usage_errors(k0_file, tmp_path):
    bad_order = 'exists p^{1,2}. exists q^{1}. E F (p & q)'
    assert main(['check', '--model', k0_file, '--state', 'u', '--semantics', 'tree',
                 '--formula', bad_order]) == EXIT_USAGE
    assert main(['check', '--model', str(tmp_path / 'missing.cks'), '--state', 'u',
                 '--formula', 'p']) == EXIT_USAGE
    assert main(['check', '--model', k0_file, '--state', 'u', '--formula', 'p &']) == EXIT_USAGE
    assert main(['check', '--model', k0_file, '--state', 'z', '--formula', 'p']) == EXIT_USAGE
    assert main(['check', '--model', k0_file, '--state', 'u', '--semantics', 'game',
                 '--formula', 'p']) == EXIT_USAGE


def test_resource_exit_code(k0_file):
    code = main(['--max-nta-states', '1', 'check', '--model', k0_file, '--state', 'u', '--semantics', 'tree',
                 '--formula', 'exists q^{1}. E X q'])
    assert code == EXIT_RESOURCE


def test_translate(k0_file, capsys):
    assert main(['translate', '--locals', 'a b', '--formula', 'E X p']) == EXIT_TRUE
    assert capsys.readouterr().out.strip() == 'E X p'
    assert main(['translate', '--model', k0_file, '--formula', 'exists q^{1}. q']) == EXIT_TRUE
    out = capsys.readouterr().out
    assert out.startswith('exists q. ')
    assert '"@l1"' in out or '@l1' in out
    assert main(['translate', '--locals', 'a b', '--formula', 'E X X p']) == EXIT_USAGE


def test_dump_automata_command(k0_file, tmp_path):
    out = tmp_path / 'dump'
    assert main(['dump-automata', '--model', k0_file, '--state', 'u', '--formula', 'E X p',
                 '--dir', str(out)]) == EXIT_TRUE
    assert any(path.suffix == '.txt' for path in out.iterdir())


def test_parser_requires_a_formula():
    with pytest.raises(SystemExit):
        build_parser().parse_args(['check', '--model', 'k.cks', '--state', 'u'])


def test_selftest_suites():
    cfg = default_config()
    for key in ('parity_games', 'dualize_pairs', 'ltl_formulas', 'lassos_per_formula'):
        cfg.selftest[key] = 3
    assert run_suites(['parity', 'dualize', 'ltl'], cfg)
    assert set(SUITES) >= {'structure', 'transs', 'unfolding', 'curated', 'hierarchy'}
    with pytest.raises(NotImplementedError):
        run_suites(['nonexistent'], cfg)


def test_logger_section(caplog):
    cfg = default_config()
    assert set(cfg.logger) >= {'backend', 'exp_name', 'level', 'show_stats'}
    assert get_logger(cfg.logger, verbose=True).level == logging.DEBUG
    cfg.logger.backend = 'tensorboard'
    with pytest.raises(NotImplementedError):
        get_logger(cfg.logger)
    cfg.logger.backend = 'console'
    logger = get_logger(cfg.logger)
    logger.addHandler(caplog.handler)
    try:
        log_scalar('game_positions', 12)
        log_scalar('seconds', 0.5, step=3)
    finally:
        logger.removeHandler(caplog.handler)
    assert 'game_positions: 12' in caplog.text
    assert 'seconds: 0.500 (step 3)' in caplog.text
