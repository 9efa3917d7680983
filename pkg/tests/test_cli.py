import json

import pytest

from nonphys.cli import EXIT_INPUT, EXIT_OK, main


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


def test_compute_diamond(capsys):
    code, body = run(capsys, ['compute', 'diamond', '--channel', 'builtin:transpose?d=3'])
    assert code == EXIT_OK
    assert body['schema'] == 1
    assert body['command'] == 'compute'
    assert body['results']['diamond']['value'] == pytest.approx(3.0, abs=1e-6)
    assert body['results']['diamond']['status'] == 'Optimal'


def test_output_is_deterministic(capsys):
    argv = ['compute', 'R', 'Rprime', '--channel', 'builtin:random_hp_map?seed=4&d=2']
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_malformed_channel_file(tmp_path, capsys):
    path = tmp_path / 'bad.json'
    path.write_text('{"d_in": 2,')
    code, body = run(capsys, ['compute', 'diamond', '--channel', str(path)])
    assert code == EXIT_INPUT
    assert body is None


@pytest.mark.parametrize('argv', [
    ['compute', 'diamond', '--channel', 'builtin:nosuchmap'],
    ['compute', 'diamond'],
    ['compute', 'diamond', '--channel', 'builtin:identity', '--gap-tol', '-1'],
    ['nonmarkov', '--family', 'nosuchfamily', '--t-max', '1'],
])
def test_bad_input_exits_2(capsys, argv):
    code, body = run(capsys, argv)
    assert code == EXIT_INPUT
    assert body is None


def test_unknown_measure_is_an_argparse_error():
    with pytest.raises(SystemExit):
        main(['compute', 'trace', '--channel', 'builtin:identity'])


def test_out_and_dump_sdp(tmp_path, capsys):
    out, dump = tmp_path / 'report.json', tmp_path / 'programs.json'
    code = main(['compute', 'cptni', '--channel', 'builtin:transpose?d=2', '--out', str(out),
                 '--dump-sdp', str(dump)])
    assert code == EXIT_OK
    assert capsys.readouterr().out == ''
    body = json.loads(out.read_text())
    assert body['results']['cptni']['value'] == pytest.approx(2.0, abs=1e-6)
    programs = json.loads(dump.read_text())
    assert programs['schema'] == 1
    assert len(programs['programs']) == 2


def test_save_witnesses_flag(tmp_path, capsys):
    path = tmp_path / 'w.h5'
    code, _ = run(capsys, ['compute', 'diamond', '--channel', 'builtin:identity?d=2', '--save-witnesses', str(path)])
    assert code == EXIT_OK
    assert path.exists()


def test_game_command(capsys):
    code, body = run(capsys, ['game', '--channel', 'builtin:transpose?d=2'])
    assert code == EXIT_OK
    assert body['game']['passed'] is True
    assert body['game']['advantage'] == pytest.approx(1.5, abs=1e-6)


def test_verify_command(capsys):
    code, body = run(capsys, ['verify', '--channel', 'builtin:extreme_disparity'])
    assert code == EXIT_OK
    assert body['verify']['passed'] is True


def test_bounds_command(capsys):
    code, body = run(capsys, ['bounds', '--channel', 'builtin:depolarizing_inverse?p=0.5&d=2', '--probes', '5'])
    assert code == EXIT_OK
    assert body['bounds']['consistent'] is True


def test_simulate_command(capsys):
    code, body = run(capsys, ['simulate', '--channel', 'builtin:transpose?d=2', '--probes', '10'])
    assert code == EXIT_OK
    assert body['cost'] == pytest.approx(2.0, abs=1e-6)
    assert body['residual'] <= 1e-8


def test_nonmarkov_command(capsys):
    code, body = run(capsys, ['nonmarkov', '--family', 'depolarizing_semigroup?gamma=1', '--t-max', '1',
                              '--steps', '4'])
    assert code == EXIT_OK
    assert body['report']['markovian'] is True
