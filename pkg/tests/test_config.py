from pathlib import Path

import pytest

from config import AttackConfig, ScenarioConfig, dump_config, load_config, parse_config, parse_seeds
from config.settings import validate_config
from utils.exceptions import ConfigError

ROOT = Path(__file__).resolve().parent.parent

MINIMAL = """
[scenario]
version = 1
allocator = pos
k = 4
horizon = 1000
"""


def _with(extra: str, attack: str = '') -> str:
    text = MINIMAL + extra + '\n'
    if attack:
        text += '[attack]\n' + attack + '\n'
    return text


class TestParsing:
    def test_defaults(self):
        config = parse_config(MINIMAL)
        assert config.allocator == 'pos'
        assert config.q == 64
        assert config.n_byzantine == 0
        assert config.seeds == list(range(10))
        assert config.attack == AttackConfig(corruption_budget=0)
        assert config.log_file is None

    def test_dump_and_parse_agree(self):
        config = ScenarioConfig(allocator='space', adversary_budget=30, retarget_window=500,
                                distribution={p: 5 for p in range(20)}, seeds=[3, 1, 4],
                                budget_steps=[(100, 2, 0)],
                                attack=AttackConfig(strategy='resource_bleeding', patience=900,
                                                    release_schedule=[(50, 1)])).resolve()
        assert parse_config(dump_config(config)) == config

    def test_lists_and_ranges(self):
        config = parse_config(_with('seeds = 2..4\ndistribution = 0:7, 1:3\nn_processes = 2',
                                    'strategy = none\nrelease_schedule = 10:0, 20:1'))
        assert config.seeds == [2, 3, 4]
        assert config.distribution == {0: 7, 1: 3}
        assert config.attack.release_schedule == [(10, 0), (20, 1)]
        assert parse_seeds('5, 1, 5') == [5, 1, 5]
        with pytest.raises(ValueError):
            parse_seeds('9..2')


class TestValidation:
    @pytest.mark.parametrize('text, field', [
        (_with('colour = red'), 'scenario.colour'),
        (MINIMAL.replace('version = 1\n', ''), 'scenario.version'),
        (MINIMAL.replace('version = 1', 'version = 2'), 'scenario.version'),
        (_with('rho = lots'), 'scenario.rho'),
        (MINIMAL.replace('horizon = 1000', 'horizon = 10'), 'scenario.horizon'),
        (_with('adversary_budget = 101'), 'scenario.adversary_budget'),
        (_with('', 'strategy = selfish'), 'attack.strategy'),
        (_with('adversary_budget = 30', 'strategy = long_range\nfork_height = 3'),
         'attack.release_schedule'),
        (_with('adversary_budget = 30', 'strategy = nothing_at_stake\ntips = 1'), 'attack.tips'),
        (_with('adversary_budget = 30', 'strategy = resource_bleeding'), 'scenario.retarget_window'),
        (_with('', 'strategy = private'), 'scenario.n_byzantine'),
        ('[attack]\nstrategy = none\n', 'scenario'),
    ])
    def test_error_names_the_field(self, text, field):
        with pytest.raises(ConfigError) as error:
            parse_config(text)
        assert str(error.value).startswith(field)

    def test_bleeding_needs_reusable_resource(self):
        config = ScenarioConfig(allocator='pow', adversary_budget=30, retarget_window=100,
                                attack=AttackConfig(strategy='resource_bleeding'))
        with pytest.raises(ConfigError, match='attack.strategy'):
            validate_config(config)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match='не найден'):
            load_config(str(tmp_path / 'absent.ini'))


class TestShippedScenarios:
    @pytest.mark.parametrize('path', [ROOT / 'config.ini'] + sorted((ROOT / 'scenarios').glob('*.ini')),
                             ids=lambda path: path.name)
    def test_parses(self, path):
        config = load_config(str(path))
        assert config.seeds
        assert config.horizon >= config.q
