# encoding: utf-8

"""
.. _`qcheshire`:

qcheshire
=========

| qcheshire: shell command
| cli: qcheshire module

Subcommands:

``sweep``
    noiseless detection probability over the phase grid:
    CSV ``phase_rad,probability`` plus a JSON sidecar with the predictions

``montecarlo``
    simulated coincidence counts: CSV ``phase_rad,counts,duration_s``
    plus a run manifest

``analyze``
    fringe fit and weak-value estimates for a counts CSV,
    optionally with an SVG plot

``reproduce-paper``
    all reference configurations, with a comparison table of predicted,
    simulated and measured values

``fresnel``
    Brewster angle and reflectances of a glass slide

Exit status is 0 on success, 1 on a runtime failure and 2 on a usage or
configuration error. Errors are reported as one line on stderr.

.. code-block:: py

   import qcheshire.cli as cli

"""

import csv
import json
import logging
import os
import sys
from math import cos, radians

from . import __version__
from .analysis import (estimate_pi_weak, estimate_sigma_weak, fit_fringe, intensity_drop,
                       mean_counts, visibility_uncertainty, weak_value_report)
from .config import (config_digest, load_config, make_manifest, reference_configs, parse_config)
from .elements import slide_summary
from .errors import CheshireError, ConfigError, SchemaError, UndefinedVisibilityError
from .experiment import mean_probability, sweep
from .montecarlo import read_records, simulate_sweep, write_records
from .plot import counts_svg
from .table import draw_table, paren
from .weak import exact_visibility, ideal_weak_values, predicted_absorber_shift

logger = logging.getLogger(__name__)

DEFAULTS = {'config': None, 'seed': 0, 'out': None, 'svg': False, 'format': 'csv',
            'reference': None, 'workers': None, 'verbose': False, 'quiet': False,
            'method': 'quadratic', 'refractive_index': 1.5, 'angle': None}

REPORTED = {
    'n0': (2526, 7), 'n1': (2537, 8), 'n2': (2146, 6),
    'drop2': (0.151, 0.008),
    'pi1': (-0.03, 0.04), 'pi2': (1.02, 0.04),
    'v1_10': (0.21, 0.05), 'v1_20': (0.40, 0.05),
    'sigma1': (0.86, 0.21), 'sigma2': (0.06, 0.20),
    'vf_10': (0.26, 0.05), 'vf_20': (0.45, 0.05),
}


def _load(args):
    if args['config'] is None:
        return parse_config({})
    return load_config(args['config'])


def _sidecar(path, suffix):
    stem, _ = os.path.splitext(path)
    return stem + suffix


def _complex(z):
    return [z.real, z.imag]


def _predictions(run):
    e = run.experiment
    try:
        vis = exact_visibility(e.t1, e.t2, e.theta1, e.theta2)
    except UndefinedVisibilityError:
        vis = None
    weak = ideal_weak_values(0.0, e.delta1, e.delta2)
    reflectance = {arm: 1 - t for arm, t in ((1, e.t1), (2, e.t2))}
    return {
        'exact_visibility': vis,
        'scaled_visibility': None if vis is None else vis * e.visibility_scale,
        'mean_probability': mean_probability(e),
        'weak_values_phi0': {k: _complex(v) for k, v in weak.items()},
        'predicted_absorber_shift': {
            'arm{}'.format(arm): predicted_absorber_shift(weak['pi{}'.format(arm)], r)
            for arm, r in reflectance.items()},
        'config_digest': config_digest(run),
    }


def _write_rows(f, header, rows):
    w = csv.writer(f, lineterminator='\n')
    w.writerow(header)
    w.writerows(rows)


def cmd_sweep(args):
    run = _load(args)
    curve = sweep(run.experiment, args['workers'])
    info = _predictions(run)
    info['curve_visibility'] = curve.visibility if curve.mean > 0 else None
    rows = [(repr(phase), repr(p)) for phase, p in curve.points]
    if args['format'] == 'json':
        info['points'] = [list(p) for p in curve.points]
        text = json.dumps(info, indent=1)
        if args['out'] is None:
            print(text)
        else:
            with open(args['out'], 'w', encoding='utf-8') as f:
                f.write(text)
        return 0
    if args['out'] is None:
        _write_rows(sys.stdout, ('phase_rad', 'probability'), rows)
        return 0
    with open(args['out'], 'w', encoding='utf-8', newline='') as f:
        _write_rows(f, ('phase_rad', 'probability'), rows)
    with open(_sidecar(args['out'], '.json'), 'w', encoding='utf-8') as f:
        json.dump(info, f, indent=1)
    logger.info('wrote %s', args['out'])
    return 0


def cmd_montecarlo(args):
    run = _load(args)
    seed = int(args['seed'])
    records = simulate_sweep(run.experiment, run.source, run.jitter, seed, args['workers'])
    manifest = make_manifest(run, seed).to_dict()
    if args['format'] == 'json':
        text = json.dumps({'manifest': manifest,
                           'records': [[r.phase, r.counts, r.duration] for r in records]},
                          indent=1)
        if args['out'] is None:
            print(text)
        else:
            with open(args['out'], 'w', encoding='utf-8') as f:
                f.write(text)
    elif args['out'] is None:
        _write_rows(sys.stdout, ('phase_rad', 'counts', 'duration_s'),
                    [(repr(r.phase), r.counts, repr(r.duration)) for r in records])
    else:
        write_records(records, args['out'])
        with open(_sidecar(args['out'], '.manifest.json'), 'w', encoding='utf-8') as f:
            json.dump(manifest, f, indent=1)
    mean, sdm = mean_counts(records)
    logger.info('mean counts per bin %s', paren(mean, sdm))
    return 0


def analyze(records, run, reference=None, method='quadratic'):
    '''
    Fit and weak-value estimates for one counts dataset.

    :param records: the count records
    :param run: the |RunConfig| the data were taken with
    :param reference: count records without filter; when missing, the
        expected counts of the same configuration without absorbers are used
    '''
    e = run.experiment
    fit = fit_fringe(records)
    mean, sdm = mean_counts(records)
    if reference is not None:
        n0, sdm0 = mean_counts(reference)
    else:
        neutral = e.replace(t1=1.0, t2=1.0)
        n0, sdm0 = run.source.expected_counts(mean_probability(neutral)), 0.0
    weak = ideal_weak_values(0.0, e.delta1, e.delta2)
    out = {
        'fit': fit.to_dict(),
        'mean_counts': {'value': mean, 'sdm': sdm},
        'reference_counts': {'value': n0, 'sdm': sdm0},
        'intensity_drop': intensity_drop(n0, mean, sdm0, sdm).to_dict(),
        'visibility_unscaled': fit.visibility / e.visibility_scale,
        'method_tag': method,
        'weak_values': {},
    }
    for arm, t in ((1, e.t1), (2, e.t2)):
        if t < 1:
            out['weak_values']['re_pi_{}'.format(arm)] = estimate_pi_weak(
                n0, mean, 1 - t, sdm0, sdm).to_dict()
    rotated = [(arm, theta) for arm, theta in ((1, e.theta1), (2, e.theta2)) if theta != 0]
    if len(rotated) > 1:
        logger.warning('theta1 and theta2 both rotated: one fringe cannot separate the arms')
        out['sigma_note'] = 'theta1 and theta2 both rotated; |<sigma Pi_k>_w| not estimated'
        rotated = []
    vis, vis_stderr = fit.visibility_estimate()
    for arm, theta in rotated:
        pi_weak = weak['pi{}'.format(arm)].real
        for tag in sorted({method, 'first_order'}):
            key = 'abs_sigma_{}'.format(arm) + ('' if tag == method else '_first_order')
            out['weak_values'][key] = estimate_sigma_weak(
                vis, theta, e.visibility_scale, pi_weak, tag,
                vis_stderr, run.residual_visibility_floor).to_dict()
    return fit, out


def cmd_analyze(args):
    if not args.get('counts'):
        raise ConfigError('no counts file given')
    run = _load(args)
    records = read_records(args['counts'])
    reference = read_records(args['reference']) if args['reference'] else None
    fit, out = analyze(records, run, reference, args['method'])
    text = json.dumps(out, indent=1)
    if args['out'] is None:
        print(text)
    else:
        with open(args['out'], 'w', encoding='utf-8') as f:
            f.write(text)
    if args['svg']:
        target = _sidecar(args['out'] or args['counts'], '.svg')
        counts_svg(records, fit, run.experiment, target, title=run.name)
    return 0


def _slug(name):
    return ''.join(c if c.isalnum() else '_' for c in name).strip('_')


def reproduce_reference(out_dir, seed=0, workers=None, svg=True):
    '''
    Run every reference configuration noiselessly and as a Monte Carlo
    experiment, write the per-configuration files into ``out_dir`` and
    return the comparison rows
    ``(quantity, predicted, simulated, reported)`` as dictionaries.
    '''
    os.makedirs(out_dir, exist_ok=True)
    configs = reference_configs()
    expected, measured, fits, curves = {}, {}, {}, {}
    for i, (name, run) in enumerate(configs.items()):
        e = run.experiment
        curve = sweep(e, workers)
        records = simulate_sweep(e, run.source, run.jitter, int(seed) * 100 + i, workers)
        fit = fit_fringe(records)
        slug = _slug(name)
        with open(os.path.join(out_dir, slug + '.sweep.csv'), 'w', encoding='utf-8',
                  newline='') as f:
            _write_rows(f, ('phase_rad', 'probability'),
                        [(repr(x), repr(p)) for x, p in curve.points])
        write_records(records, os.path.join(out_dir, slug + '.counts.csv'))
        if svg:
            counts_svg(records, fit, e, os.path.join(out_dir, slug + '.svg'), title=name)
        expected[name] = run.source.expected_counts(curve.mean)
        measured[name] = mean_counts(records)
        fits[name] = fit
        curves[name] = curve

    reflectance = 1 - configs['filter arm 2'].experiment.t2
    vm = configs['no filter'].experiment.visibility_scale
    rows = []

    def row(quantity, predicted, simulated, stderr, reported):
        rows.append({'quantity': quantity, 'predicted': predicted, 'simulated': simulated,
                     'simulated_stderr': stderr, 'reported': reported})

    for key, name in (('n0', 'no filter'), ('n1', 'filter arm 1'), ('n2', 'filter arm 2')):
        row('<N> ' + name, expected[name], measured[name][0], measured[name][1], REPORTED[key])
    drop_exp = intensity_drop(expected['no filter'], expected['filter arm 2'])
    drop_sim = intensity_drop(measured['no filter'][0], measured['filter arm 2'][0],
                              measured['no filter'][1], measured['filter arm 2'][1], 2.0)
    row('drop, filter arm 2', drop_exp.value, drop_sim.value, drop_sim.stat, REPORTED['drop2'])
    pis = {}
    for arm in (1, 2):
        name = 'filter arm {}'.format(arm)
        p = estimate_pi_weak(expected['no filter'], expected[name], reflectance)
        s = estimate_pi_weak(measured['no filter'][0], measured[name][0], reflectance,
                             measured['no filter'][1], measured[name][1])
        pis[arm] = s
        row('Re<Pi{}>_w'.format(arm), p.value, s.value, s.stat, REPORTED['pi{}'.format(arm)])
    sigma = radians(2)
    for deg in (10, 20):
        name = 'theta1 {} deg'.format(deg)
        fit = fits[name]
        row('V1({} deg)'.format(deg), curves[name].visibility * vm, fit.visibility,
            fit.visibility_stderr, REPORTED['v1_{}'.format(deg)])
    for deg in (10, 20):
        name = 'theta2 {} deg'.format(deg)
        row('<N>(theta2 {} deg)/<N>(0)'.format(deg), cos(radians(deg)) ** 2,
            measured[name][0] / measured['no filter'][0], None, None)
    rotations = {arm: [(radians(deg), *fits['theta{} {} deg'.format(arm, deg)].visibility_estimate())
                       for deg in (10, 20)] for arm in (1, 2)}
    absorption = {None: measured['no filter'], 1: measured['filter arm 1'],
                  2: measured['filter arm 2']}
    report = weak_value_report(absorption, rotations, reflectance, vm)
    for arm in (1, 2):
        truth = [estimate_sigma_weak(curves['theta{} {} deg'.format(arm, deg)].visibility,
                                     radians(deg), 1.0, 1.0 if arm == 2 else 0.0).value
                 for deg in (10, 20)]
        est = getattr(report, 'abs_sigma_{}'.format(arm))
        row('|<sigma Pi{}>_w|'.format(arm), sum(truth) / 2, est.value, est.uncertainty,
            REPORTED['sigma{}'.format(arm)])
    for deg in (10, 20):
        name = 'filter arm 2, theta1 {} deg'.format(deg)
        fit = fits[name]
        row('V1({} deg), filtered'.format(deg), curves[name].visibility * vm, fit.visibility,
            fit.visibility_stderr, REPORTED['vf_{}'.format(deg)])
        logger.debug('%s: visibility spread from 2 deg settings %.3f', name,
                     visibility_uncertainty(configs[name].experiment, sigma))
    for deg in (10, 20):
        name = 'filter arm 1, theta2 {} deg'.format(deg)
        row('<N> {} / unfiltered'.format(name), expected[name] / expected['theta2 {} deg'.format(deg)],
            measured[name][0] / measured['theta2 {} deg'.format(deg)][0], None, None)
    return rows


def comparison_table(rows):
    table = [['quantity', 'predicted', 'simulated', 'reported']]
    for r in rows:
        reported = '' if r['reported'] is None else paren(*r['reported'])
        table.append([r['quantity'], paren(r['predicted']),
                      paren(r['simulated'], r['simulated_stderr']), reported])
    return draw_table(table)


def cmd_reproduce_paper(args):
    out_dir = args['out'] or 'reproduction'
    rows = reproduce_reference(out_dir, args['seed'], args['workers'], svg=True)
    lines = ['Comparison with the measured values', '=' * 35, ''] + comparison_table(rows)
    with open(os.path.join(out_dir, 'comparison.rst'), 'w', encoding='utf-8') as f:
        f.write('\n'.join(lines) + '\n')
    with open(os.path.join(out_dir, 'comparison.json'), 'w', encoding='utf-8') as f:
        json.dump({'seed': int(args['seed']), 'tool_version': __version__, 'rows': rows}, f,
                  indent=1)
    print('\n'.join(comparison_table(rows)))
    return 0


def cmd_fresnel(args):
    n = args['refractive_index']
    theta = None if args['angle'] is None else radians(args['angle'])
    summary = slide_summary(n, theta)
    if args['format'] == 'json':
        print(json.dumps(summary, indent=1))
    else:
        print('\n'.join(draw_table([['quantity', 'value']]
                                   + [[k, '{:.6g}'.format(v)] for k, v in summary.items()])))
    return 0


COMMANDS = {
    'sweep': cmd_sweep,
    'montecarlo': cmd_montecarlo,
    'analyze': cmd_analyze,
    'reproduce-paper': cmd_reproduce_paper,
    'fresnel': cmd_fresnel,
}


def make_parser():
    import argparse
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='YAML configuration file')
    common.add_argument('--seed', type=int, default=0, help='random seed')
    common.add_argument('--out', help='output file (directory for reproduce-paper)')
    common.add_argument('--format', choices=('csv', 'json'), default='csv')
    common.add_argument('--workers', type=int, help='threads for sweeps')
    common.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    common.add_argument('-q', '--quiet', action='store_true', help='warnings only')
    parser = argparse.ArgumentParser(
        prog='qcheshire',
        description='''Single-photon quantum Cheshire cat: sweeps, counts and weak values.''')
    parser.add_argument('--version', action='version', version=__version__)
    sub = parser.add_subparsers(dest='command', required=True)
    sub.add_parser('sweep', parents=[common], help='noiseless phase sweep')
    sub.add_parser('montecarlo', parents=[common], help='simulated counts')
    p = sub.add_parser('analyze', parents=[common], help='fit counts, estimate weak values')
    p.add_argument('counts', help='counts CSV')
    p.add_argument('--reference', help='counts CSV without filter')
    p.add_argument('--svg', action='store_true', help='also write an SVG plot')
    p.add_argument('--method', choices=('quadratic', 'first_order'), default='quadratic')
    sub.add_parser('reproduce-paper', parents=[common], help='reference configurations')
    p = sub.add_parser('fresnel', parents=[common], help='Brewster slide calculator')
    p.add_argument('-n', '--refractive-index', type=float, default=1.5)
    p.add_argument('--angle', type=float, help='incidence angle in degrees (default Brewster)')
    return parser


def main(**args):
    '''
    This corresponds to the |qcheshire| shell command.

    :param args: Keyword arguments. If empty the arguments are taken from ``sys.argv``.

    ``command`` is one of ``sweep``, ``montecarlo``, ``analyze``,
    ``reproduce-paper``, ``fresnel``; the other keys are the long option
    names with ``_`` for ``-``.

    Returns the exit status.
    '''
    if not args:
        args = make_parser().parse_args().__dict__
    args = dict(DEFAULTS, **args)
    level = logging.DEBUG if args['verbose'] else logging.WARNING if args['quiet'] else logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')
    logging.getLogger('qcheshire').setLevel(level)
    command = COMMANDS.get(args.get('command'))
    try:
        if command is None:
            raise ConfigError('unknown command {!r}'.format(args.get('command')))
        if int(args['seed']) < 0:
            raise ConfigError('--seed {} must not be negative'.format(args['seed']))
        return command(args)
    except (ConfigError, SchemaError) as e:
        print('qcheshire: error: {}'.format(' '.join(str(e).split())), file=sys.stderr)
        return 2
    except (CheshireError, OSError) as e:
        print('qcheshire: failure: {}'.format(' '.join(str(e).split())), file=sys.stderr)
        return 1

# vim: ts=4 sw=4 sts=4 et noai nocin nosi
