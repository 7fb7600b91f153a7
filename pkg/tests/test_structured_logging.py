import json
import logging

import numpy as np
import pytest

from Shadows.constants import Event, emit
from Shadows.config import LOGGING_CONFIG
from Shadows.core.logging_setup import RunLabelFilter, init_logging, reset_logging
from Shadows.core.structured_logging import current_run, describe_run, log_event, log_exception, run_context
from Shadows.dense_sim import fock_state
from Shadows.ensembles import sample_perm_setting
from Shadows.services.estimation_pipeline import EstimationPipeline


def _events(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


def test_log_event_appends_jsonl(json_log):
    log_event('shadows.test', n=4, k=2)
    log_event('shadows.test', run_id='r1', level='WARNING', note='x')
    first, second = _events(json_log)
    assert first['event'] == 'shadows.test' and first['n'] == 4 and first['level'] == 'INFO'
    assert second['run_id'] == 'r1' and second['level'] == 'WARNING'
    assert 'ts' in first and 'host' not in first
    assert list(first)[:9] == ['ts', 'event', 'level', 'run_id', 'ensemble', 'mapping', 'n', 'k', 'seed']
    assert first['ensemble'] is None and first['k'] == 2


def test_reserved_keys_are_not_overwritten(json_log):
    log_event('shadows.test', ts='fake', seed=3)
    (record,) = _events(json_log)
    assert record['ts'] != 'fake'
    assert record['seed'] == 3


def test_log_exception_records_type(json_log):
    try:
        raise KeyError('mu')
    except KeyError as e:
        log_exception('shadows.test.error', exc=e, step='fold')
    (record,) = _events(json_log)
    assert record['level'] == 'ERROR'
    assert record['exception']['type'] == 'KeyError'
    assert record['step'] == 'fold'


def test_emit_never_raises(json_log):
    def boom(*_a, **_k):
        raise RuntimeError('logger down')

    emit(Event.PLAN_START, boom, n=2)
    emit('shadows.custom', log_event, n=2)
    assert _events(json_log)[0]['event'] == 'shadows.custom'


def test_unwritable_log_path_is_ignored(tmp_path, monkeypatch):
    blocker = tmp_path / 'blocker'
    blocker.write_text('x')
    monkeypatch.setenv('SHADOWS_JSON_LOG', str(blocker / 'events.jsonl'))
    log_event('shadows.test')


def test_rotation(json_log, monkeypatch):
    monkeypatch.setenv('SHADOWS_JSON_LOG_MAX', '200')
    for i in range(10):
        log_event('shadows.rotate', i=i, padding='x' * 50)
    rotated = [p for p in json_log.parent.iterdir() if p.name.startswith('events.jsonl.')]
    assert rotated
    assert len(json_log.read_text().splitlines()) < 10


def test_run_context_binds_coordinates(json_log):
    with run_context(ensemble='nc', mapping='bk', n=4, k=2, seed=7):
        log_event('shadows.inner')
        with run_context(seed=8):
            log_event('shadows.nested', k=1)
        assert describe_run() == 'nc/bk n=4 k=2 seed=7'
    log_event('shadows.outer')
    inner, nested, outer = _events(json_log)
    assert (inner['ensemble'], inner['mapping'], inner['n'], inner['k'], inner['seed']) == ('nc', 'bk', 4, 2, 7)
    assert nested['seed'] == 8 and nested['k'] == 1 and nested['n'] == 4
    assert outer['n'] is None
    assert current_run() == {}
    assert describe_run() == '-'


def test_run_context_rejects_unknown_fields():
    with pytest.raises(ValueError):
        with run_context(molecule='h2'):
            pass


def test_pipeline_events_carry_the_run(json_log):
    state = fock_state([1, 0])
    settings = [sample_perm_setting(2, np.random.default_rng(0)) for _ in range(2)]
    EstimationPipeline().run(settings, state, 1, mapping='bk', shots=2, seed=5)
    events = {e['event']: e for e in _events(json_log)}
    done = events['shadows.estimate.complete']
    assert (done['ensemble'], done['mapping'], done['n'], done['k'], done['seed']) == ('fgu', 'bk', 2, 1, 5)
    assert events['shadows.estimate.start']['settings'] == 2


def test_console_lines_are_labelled_with_the_run():
    record = logging.LogRecord('Shadows.test', logging.INFO, __file__, 1, 'hello', None, None)
    with run_context(ensemble='fgu', mapping='jw', n=3, k=1):
        assert RunLabelFilter().filter(record)
    assert record.run == 'fgu/jw n=3 k=1'


def test_init_logging_follows_logging_config(tmp_path, monkeypatch):
    monkeypatch.setitem(LOGGING_CONFIG, 'level', 'WARNING')
    monkeypatch.setitem(LOGGING_CONFIG, 'format', '%(levelname)s [%(run)s] %(message)s')
    try:
        init_logging(log_dir=str(tmp_path))
        log = logging.getLogger('Shadows.test')
        with run_context(ensemble='fgu', mapping='jw', n=2, k=1):
            log.info('dropped below the configured level')
            log.warning('kept')
        for h in logging.getLogger().handlers:
            h.flush()
        lines = (tmp_path / 'shadows.log').read_text(encoding='utf-8').splitlines()
    finally:
        reset_logging()
    assert lines == ['WARNING [fgu/jw n=2 k=1] kept']
