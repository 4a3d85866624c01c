import json

import numpy as np
import pytest

from src.api.render import RenderStyle, element_counts, render_svg
from src.api.schemas import (
    ExpSumModel,
    NetModel,
    PencilInput,
    RunConfig,
    emit,
    from_extended,
    parse_json,
    to_extended,
)
from src.main import EXIT_INPUT, EXIT_OK, EXIT_VERIFICATION, run
from src.pencil.spec import ExtendedComplex
from src.section.net import Net
from src.section.section import build_section, section_skeleton
from src.skeleton.planar import build_skeleton_2d
from src.solve.roots import ZEROS, find_roots

TRIANGLE = {
    'dim': 1,
    'terms': [
        {'alpha': [0, 0], 'm': [[0, 0]]},
        {'alpha': [0, 0], 'm': [[1, 0]]},
        {'alpha': [0, 0], 'm': [[0, 1]]},
    ],
}

PHASES = 2 * np.pi * np.arange(3) / 3
PENCIL = {
    'exponents': [[[0, 0]], [[1, 0]], [[0, 2]]],
    'alpha0': [[0, float(phi)] for phi in PHASES],
    'alphainf': [[0, 0]] * 3,
}

TRIPLE_NET = {'epsilon': 0.75, 'domain': [-0.5, -2, 1.5, 2], 'points': [[0, 0], [0.5, 0], [1, 0]]}


@pytest.fixture
def write_json(tmp_path):
    def write(name, data):
        path = tmp_path / name
        path.write_text(data if isinstance(data, str) else json.dumps(data), encoding='utf-8')
        return str(path)

    return write


def test_expsum_model_from_sum(triangle):
    model = ExpSumModel.from_sum(triangle)
    assert model.dim == 1
    assert [t.m for t in model.terms] == [[(0.0, 0.0)], [(1.0, 0.0)], [(0.0, 1.0)]]
    rebuilt = model.to_sum()
    np.testing.assert_allclose(rebuilt.exponents, triangle.exponents)


def test_parse_json_reports_line_of_malformed_input():
    with pytest.raises(ValueError, match="line 2"):
        parse_json('{"dim": 1,\n "terms": [}', ExpSumModel)


def test_parse_json_rejects_wrong_exponent_length():
    bad = {'dim': 2, 'terms': [{'alpha': [0, 0], 'm': [[1, 0]]}]}
    with pytest.raises(ValueError, match="Invalid ExpSumModel"):
        parse_json(json.dumps(bad), ExpSumModel)


def test_parse_json_rejects_unknown_fields():
    with pytest.raises(ValueError):
        parse_json(json.dumps({**TRIANGLE, 'extra': 1}), ExpSumModel)


def test_run_config_requirements():
    with pytest.raises(ValueError):
        RunConfig(command='skeleton', input='sum.json')
    with pytest.raises(ValueError):
        RunConfig(command='net', window='0,0,1,1')
    with pytest.raises(ValueError):
        RunConfig(command='certify')
    assert RunConfig(command='net', window='0,0,1,1', epsilon=0.3).format == 'json'


def test_net_model_maps_missing_delta_to_nan():
    net = Net([0, 1], 0.6, (0, 0, 1, 1))
    model = NetModel.from_net(net)
    assert model.delta is None
    assert np.isnan(model.to_net().delta)
    assert json.loads(emit(model))['points'] == [[0.0, 0.0], [1.0, 0.0]]


def test_extended_values():
    assert to_extended(ExtendedComplex.of('inf')) == 'inf'
    assert to_extended(ExtendedComplex.of(1 - 2j)) == (1.0, -2.0)
    assert from_extended('inf').infinite
    assert from_extended((1.0, 2.0)).value == 1 + 2j


def test_render_skeleton(two_terms, strip):
    skeleton = build_skeleton_2d(two_terms, strip)
    document = render_svg(strip, skeleton=skeleton)
    assert element_counts(document) == {'cell': 2, 'edge': 1}
    assert document == render_svg(strip, skeleton=skeleton)
    assert 'pixel = ' in document


def test_render_roots(two_terms, strip):
    roots = find_roots(two_terms, strip, ZEROS)
    counts = element_counts(render_svg(strip, roots=roots))
    assert counts == {'root': 2}


def test_render_empty_canvas(strip):
    assert element_counts(render_svg(strip)) == {}


def test_render_section_skeleton_with_sites():
    window = (0, -0.5, 1, 0.5)
    net = Net([0.25, 0.75], 0.6, window)
    skeleton = section_skeleton(build_section(net, k=8 * np.pi), window)
    counts = element_counts(render_svg(window, skeleton=skeleton, net=net))
    assert counts['edge'] == 1
    assert counts['site'] == 2


def test_render_style_from_config():
    style = RenderStyle.from_config({'canvas': 300, 'unknown': 1})
    assert style.canvas == 300
    assert style.margin == 20


def test_certify(write_json, capsys):
    path = write_json('sum.json', TRIANGLE)
    assert run(['certify', '--input', path]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report['delta_set'] == pytest.approx(0.5)
    assert report['strongly_basic']


def test_certify_with_window_classifies(write_json, capsys):
    path = write_json('sum.json', TRIANGLE)
    assert run(['certify', '--input', path, '--window', '-3,-3,3,3']) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report['classification']['strictly']


def test_missing_input_file(tmp_path):
    assert run(['certify', '--input', str(tmp_path / 'missing.json')]) == EXIT_INPUT


def test_malformed_input(write_json):
    path = write_json('sum.json', '{"dim": 1, "terms": [')
    assert run(['certify', '--input', path]) == EXIT_INPUT


def test_argument_errors():
    assert run([]) == EXIT_INPUT
    assert run(['certify', '--bogus']) == EXIT_INPUT
    assert run(['skeleton', '--input', 'sum.json']) == EXIT_INPUT


def test_net_writes_json_and_svg(tmp_path):
    out, svg = tmp_path / 'net.json', tmp_path / 'net.svg'
    code = run(['net', '--window', '0,0,1,1', '--epsilon', '0.3', '--output', str(out), '--svg', str(svg)])
    assert code == EXIT_OK
    net = parse_json(out.read_text(encoding='utf-8'), NetModel).to_net()
    assert net.size > 0
    assert element_counts(svg.read_text(encoding='utf-8'))['site'] == net.size


def test_pencil_verification_failure_exits_2(write_json, capsys):
    path = write_json('pencil.json', PENCIL)
    config = write_json('settings.yaml', 'pencil:\n  t_samples: 10\n')
    code = run(['--config', config, 'pencil', '--input', path, '--window', '-3,-3,3,3', '--c', '0.01'])
    assert code == EXIT_VERIFICATION
    report = json.loads(capsys.readouterr().out)
    assert report['verification']['passed'] is False


def test_section_of_degenerate_net(write_json, capsys):
    path = write_json('net.json', TRIPLE_NET)
    code = run(['section', '--input', path, '--k', str(16 * np.log(2)), '--apply-shift'])
    assert code == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert len(report['clusters']['clusters']) == 2
    assert len(report['surgery']['eps_hat']) == 2
    assert [m['terms'] for m in report['local_models']] == [3, 3]
    assert report['verification']['skeleton_consistent']


@pytest.mark.parametrize('model, data', [(ExpSumModel, TRIANGLE), (NetModel, TRIPLE_NET), (PencilInput, PENCIL)])
def test_inputs_survive_emit_and_parse(model, data):
    first = parse_json(json.dumps(data), model)
    text = emit(first)
    second = parse_json(text, model)
    assert second == first
    assert emit(second) == text


def _outputs_of(tmp_path, tag, argv):
    out = tmp_path / f'{tag}.json'
    svg = tmp_path / f'{tag}.svg'
    assert run(argv + ['--output', str(out), '--svg', str(svg)]) == EXIT_OK
    return out.read_bytes(), svg.read_bytes()


def test_repeated_runs_write_identical_bytes(write_json, tmp_path):
    sum_path = write_json('sum.json', TRIANGLE)
    net_path = write_json('net.json', TRIPLE_NET)
    commands = {
        'skeleton': ['skeleton', '--input', sum_path, '--window', '-3,-3,3,3'],
        'roots': ['roots', '--input', sum_path, '--window', '-4,-4,4,4', '--mode', 'critical', '--seed', '3'],
        'net': ['net', '--window', '0,0,1,1', '--epsilon', '0.3', '--seed', '7'],
        'section': ['section', '--input', net_path, '--k', str(16 * np.log(2))],
    }
    for name, argv in commands.items():
        first = _outputs_of(tmp_path, f'{name}-first', argv)
        second = _outputs_of(tmp_path, f'{name}-second', argv)
        assert first == second, name
        assert first[0] and first[1].startswith(b'<svg'), name


@pytest.mark.slow
def test_repeated_current_studies_are_identical(tmp_path):
    outputs = []
    for tag in ('first', 'second'):
        out = tmp_path / f'{tag}.json'
        argv = ['current', '--window', '0,0,1,1', '--k-list', '50,100', '--epsilon', '0.3', '--periodic']
        assert run(argv + ['--output', str(out)]) == EXIT_OK
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
