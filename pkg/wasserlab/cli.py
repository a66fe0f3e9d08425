"""Command-line front end.

    wasserlab distance --mu a.json --nu b.json --norm '{"kind": "lq", "q": 3}' --p 2
    wasserlab scenario --id all --workers 4
"""
import argparse
import json
import logging
import sys
from typing import Dict, List, Optional

import numpy as np

from .base import SCENARIO_REGISTRY
from .exceptions import ConfigurationError, DomainError, InputError, WasserlabError
from .measures import measure_to_json
from .norms import as_vector
from .potentials import atom_estimate, direction_search, potential_eval, potential_grid
from .projections import AffineSubspace, max_subspace_in_kernel, project_measure
from .rigidity import (IsometryCandidate, alignment_check, dirac_align_construct,
                       isometry_certificate)
from .scenarios import run_scenarios, summary_rows
from .transport import plan_to_csv_rows, solve
from .utils.config import load_config
from .utils.io import csv_text, dumps, emit, load_measure, load_subspace, parse_norm, read_json

logger = logging.getLogger('wasserlab')

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):

    def error(self, message):
        raise UsageError(message)


def _common(parser: argparse.ArgumentParser):
    parser.add_argument('--config', '-c', default=None, help='YAML config overriding the defaults')
    parser.add_argument('--norm', default='euclidean',
                        help='norm as inline JSON, a kind name, or @file.json')
    parser.add_argument('--p', type=float, default=2.0, help='transport exponent p >= 1')
    parser.add_argument('--tol', type=float, default=None)
    parser.add_argument('--seed', type=int, default=None,
                        help='random seed; scenarios fall back to the config seed')
    parser.add_argument('--out', default=None, help='write output here instead of stdout')
    parser.add_argument('--format', choices=('json', 'csv'), default='json')
    parser.add_argument('--verbose', '-v', action='store_true')
    parser.add_argument('--quiet', '-q', action='store_true')


def _vector(text: str) -> np.ndarray:
    try:
        return as_vector(json.loads(text))
    except (json.JSONDecodeError, TypeError, ValueError) as e:
        raise InputError(f'not a JSON vector: {text!r}') from e


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='wasserlab', description='Discrete Wasserstein rigidity laboratory')
    sub = parser.add_subparsers(dest='command', parser_class=_Parser)

    for name in ('distance', 'plan'):
        cmd = sub.add_parser(name, help='W_p distance' if name == 'distance' else 'optimal plan')
        _common(cmd)
        cmd.add_argument('--mu', required=True)
        cmd.add_argument('--nu', required=True)

    cmd = sub.add_parser('align', help='alignment defect of (mu, nu, eta)')
    _common(cmd)
    cmd.add_argument('--mu', required=True)
    cmd.add_argument('--nu', required=True)
    cmd.add_argument('--eta', default=None,
                     help='omit for a Dirac mu to use the dilation of nu about its atom')

    cmd = sub.add_parser('project', help='push-forward of mu by the projection onto a subspace')
    _common(cmd)
    cmd.add_argument('--mu', required=True)
    cmd.add_argument('--subspace', required=True, help='@file.json or inline JSON')

    cmd = sub.add_parser('potential', help='potential x -> d^p(mu, delta_x) on a planar grid')
    _common(cmd)
    cmd.add_argument('--mu', required=True)
    cmd.add_argument('--grid', nargs=3, type=float, default=(-3.0, 3.0, 61.0),
                     metavar=('LO', 'HI', 'COUNT'))
    cmd.add_argument('--at', action='append', default=[], help='JSON point; repeatable')

    cmd = sub.add_parser('atoms', help='atom weight estimates from second differences')
    _common(cmd)
    cmd.add_argument('--mu', required=True)
    cmd.add_argument('--at', action='append', default=[],
                     help='JSON point; defaults to every atom of mu')
    cmd.add_argument('--direction', default=None, help='JSON unit vector; default e_1')

    cmd = sub.add_parser('kernel-search', help='Hessian pairing search, or kernel span of a subspace')
    _common(cmd)
    cmd.add_argument('--dim', type=int, default=2)
    cmd.add_argument('--grid', type=int, default=16)
    cmd.add_argument('--subspace', default=None)
    cmd.add_argument('--vector', action='append', default=[], help='JSON seed vector; repeatable')

    cmd = sub.add_parser('certify', help='isometry certificate of a candidate map on probe pairs')
    _common(cmd)
    cmd.add_argument('--candidate', required=True,
                     help='JSON, e.g. {"kind": "phi_t", "t": 0.69, "axis": [1, 0]}')
    cmd.add_argument('--mu', required=True)
    cmd.add_argument('--nu', required=True)

    cmd = sub.add_parser('scenario', help='run scenarios of the corpus')
    _common(cmd)
    cmd.add_argument('--id', action='append', default=None, help="scenario id or 'all'; repeatable")
    cmd.add_argument('--workers', type=int, default=None)

    cmd = sub.add_parser('list-scenarios', help='print the scenario ids')
    _common(cmd)
    return parser


def _setup_logging(args):
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s', force=True)


def _subspace(text: str) -> AffineSubspace:
    if text.startswith('@'):
        return load_subspace(text[1:])
    try:
        return AffineSubspace.from_json(json.loads(text))
    except json.JSONDecodeError as e:
        raise InputError(f'subspace is neither @file nor JSON: {e}') from e


def _candidate(text: str) -> IsometryCandidate:
    try:
        obj = read_json(text[1:]) if text.startswith('@') else json.loads(text)
        return _candidate_from(obj)
    except (json.JSONDecodeError, KeyError, AttributeError, TypeError) as e:
        raise InputError(f'malformed candidate description: {e}') from e


def _candidate_from(obj: Dict) -> IsometryCandidate:
    kind = obj.get('kind')
    if kind == 'phi_t':
        return IsometryCandidate.phi_t(obj['t'], obj['axis'], obj.get('origin'))
    if kind == 'phi_star':
        return IsometryCandidate.phi_star(obj['axis'], obj.get('origin'))
    if kind == 'rotation':
        return IsometryCandidate.rotation(obj['angle'])
    if kind == 'affine':
        matrix = np.asarray(obj['matrix'], dtype=float)
        offset = as_vector(obj.get('offset', np.zeros(len(matrix))))
        return IsometryCandidate.pushforward(lambda x: matrix @ x + offset, label='affine')
    raise InputError(f'unknown candidate kind {kind!r}')


def _stats_json(stats) -> Dict:
    return {'iterations': stats.iterations, 'degenerate_pivots': stats.degenerate_pivots,
            'status': stats.status, 'min_reduced_cost': stats.min_reduced_cost}


class Commands:
    """One method per subcommand; each returns (payload, csv, exit code)."""

    def __init__(self, args, cfg: Dict):
        self.args = args
        self.cfg = cfg
        self.spec = parse_norm(args.norm)
        self.p = args.p
        self.seed = 0 if args.seed is None else args.seed
        self.meta = {'norm': args.norm, 'p': args.p, 'seed': self.seed}

    def distance(self):
        res = solve(load_measure(self.args.mu), load_measure(self.args.nu), self.spec, self.p,
                    self.cfg['transport'])
        out = dict(self.meta, distance=res.distance, cost_p=res.cost_p,
                   solver_stats=_stats_json(res.solver_stats))
        rows = [(res.distance, res.cost_p)]
        return out, csv_text(['distance', 'cost_p'], rows), EXIT_OK

    def plan(self):
        res = solve(load_measure(self.args.mu), load_measure(self.args.nu), self.spec, self.p,
                    self.cfg['transport'])
        rows = plan_to_csv_rows(res.plan, self.spec, self.p)
        out = dict(self.meta, distance=res.distance, cost_p=res.cost_p,
                   plan=[dict(zip(('i', 'j', 'mass', 'cost_ij'), r)) for r in rows])
        return out, csv_text(['i', 'j', 'mass', 'cost_ij'], rows), EXIT_OK

    def align(self):
        mu = load_measure(self.args.mu)
        nu = load_measure(self.args.nu)
        if self.args.eta is not None:
            eta = load_measure(self.args.eta)
        elif mu.is_dirac():
            eta = dirac_align_construct(mu.points[0], nu)
        else:
            raise InputError('--eta is required when mu is not a Dirac mass')
        tol = self.args.tol if self.args.tol is not None else self.cfg['rigidity']['tol']
        rep = alignment_check(mu, nu, eta, self.spec, self.p, tol, self.cfg['transport'])
        out = dict(self.meta, d_mu_nu=rep.d_mu_nu, d_nu_eta=rep.d_nu_eta, d_mu_eta=rep.d_mu_eta,
                   defect=rep.defect, aligned=rep.aligned, eta=measure_to_json(eta))
        rows = [(rep.d_mu_nu, rep.d_nu_eta, rep.d_mu_eta, rep.defect, int(rep.aligned))]
        return out, csv_text(['d_mu_nu', 'd_nu_eta', 'd_mu_eta', 'defect', 'aligned'], rows), EXIT_OK

    def project(self):
        mu = load_measure(self.args.mu)
        sub = _subspace(self.args.subspace)
        cfg = dict(self.cfg['projection'], transport=self.cfg['transport'])
        projected = project_measure(mu, sub, self.spec, self.p, cfg)
        out = dict(self.meta, projection=measure_to_json(projected))
        rows = [list(x) + [w] for x, w in projected.atoms]
        header = [f'x{i + 1}' for i in range(projected.dimension)] + ['weight']
        return out, csv_text(header, rows), EXIT_OK

    def potential(self):
        mu = load_measure(self.args.mu)
        if self.args.at:
            points = [_vector(t) for t in self.args.at]
            values = [potential_eval(mu, self.spec, self.p, x) for x in points]
            out = dict(self.meta, points=[x.tolist() for x in points], values=values)
            rows = [list(x) + [v] for x, v in zip(points, values)]
            header = [f'x{i + 1}' for i in range(mu.dimension)] + ['potential']
            return out, csv_text(header, rows), EXIT_OK
        lo, hi, count = self.args.grid
        ticks = np.linspace(lo, hi, int(count))
        grid = potential_grid(mu, self.spec, self.p, ticks, ticks)
        rows = [(float(x), float(y), float(grid[j, i]))
                for j, y in enumerate(ticks) for i, x in enumerate(ticks)]
        out = dict(self.meta, xs=ticks, ys=ticks, values=grid)
        return out, csv_text(['x', 'y', 'potential'], rows), EXIT_OK

    def atoms(self):
        mu = load_measure(self.args.mu)
        points = [_vector(t) for t in self.args.at] or list(mu.points)
        if self.args.direction is None:
            direction = np.eye(mu.dimension)[0]
        else:
            direction = _vector(self.args.direction)
        cfg = self.cfg['potentials']
        estimates = [atom_estimate(mu, self.spec, self.p, x, direction, h0=cfg['h0'],
                                   shrink=cfg['shrink'], steps=cfg['steps'],
                                   window_tol=cfg['window_tol']) for x in points]
        out = dict(self.meta, estimates=[
            {'location': e.location, 'estimate': e.estimate, 'converged': e.converged,
             'h_sequence': [list(pair) for pair in e.h_sequence]} for e in estimates])
        rows = [list(e.location) + [e.estimate, int(e.converged)] for e in estimates]
        header = [f'x{i + 1}' for i in range(mu.dimension)] + ['estimate', 'converged']
        return out, csv_text(header, rows), EXIT_OK

    def kernel_search(self):
        if self.args.subspace is not None:
            sub = _subspace(self.args.subspace)
            seeds = [_vector(t) for t in self.args.vector]
            cfg = dict(self.cfg['projection'], seed=self.seed)
            span = max_subspace_in_kernel(sub, self.spec, self.p, seeds, cfg)
            out = dict(self.meta, kernel_span=span.to_json(), rank=span.rank)
            return out, csv_text([f'v{i + 1}' for i in range(span.dimension)], span.directions), EXIT_OK
        found = direction_search(self.spec, self.p, self.args.dim, self.args.grid, self.seed,
                                 self.cfg['potentials'])
        if found is None:
            out = dict(self.meta, found=False)
            return out, csv_text(['found'], [[0]]), EXIT_OK
        out = dict(self.meta, found=True, v1=found.v1, v2=found.v2, min_value=found.min_value,
                   max_value=found.max_value, argmin=found.argmin)
        rows = [list(found.v1) + list(found.v2) + [found.min_value, found.max_value]]
        header = ([f'v1_{i + 1}' for i in range(found.v1.size)]
                  + [f'v2_{i + 1}' for i in range(found.v2.size)] + ['min', 'max'])
        return out, csv_text(header, rows), EXIT_OK

    def certify(self):
        cand = _candidate(self.args.candidate)
        probes = [(load_measure(self.args.mu), load_measure(self.args.nu))]
        tol = self.args.tol if self.args.tol is not None else self.cfg['rigidity']['tol']
        cert = isometry_certificate(cand, probes, self.spec, self.p, tol, self.cfg['transport'])
        out = dict(self.meta, candidate=cert.candidate, probe=cert.witness, lhs=cert.lhs,
                   rhs=cert.rhs, violation=cert.max_violation, preserved=cert.preserved,
                   note=cert.note)
        rows = [(cert.lhs, cert.rhs, cert.max_violation, int(cert.preserved))]
        return out, csv_text(['lhs', 'rhs', 'violation', 'preserved'], rows), EXIT_OK

    def scenario(self):
        section = self.cfg['scenarios']
        if self.args.workers is not None:
            section['workers'] = self.args.workers
        if self.args.seed is not None:
            section['seed'] = self.args.seed
        ids = self.args.id or section.get('ids', 'all')
        if 'all' in (ids if isinstance(ids, list) else [ids]):
            ids = 'all'
        progress = not self.args.quiet and sys.stderr.isatty()
        results = run_scenarios(ids, self.cfg, progress=progress)
        passed = sum(r.status == 'pass' for r in results)
        out = {'results': [r.to_json() for r in results],
               'summary': {'total': len(results), 'passed': passed,
                           'failed': len(results) - passed}}
        if not self.args.quiet:
            for sid, status, n_checks, n_passed in summary_rows(results):
                sys.stderr.write(f'{sid:<34} {status:<5} {n_passed}/{n_checks}\n')
        rows = summary_rows(results)
        code = EXIT_OK if passed == len(results) else EXIT_FAIL
        return out, csv_text(['scenario_id', 'status', 'checks', 'passed'], rows), code

    def list_scenarios(self):
        names = SCENARIO_REGISTRY.names()
        rows = [(sid, SCENARIO_REGISTRY[sid].anchor) for sid in names]
        out = {'scenarios': [{'id': sid, 'anchor': anchor} for sid, anchor in rows]}
        return out, csv_text(['scenario_id', 'anchor'], rows), EXIT_OK


def run(argv: Optional[List[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        sys.stderr.write(f'wasserlab: {e}\n')
        return EXIT_USAGE
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    _setup_logging(args)
    try:
        cfg = load_config(args.config)
        commands = Commands(args, cfg)
        payload, table, code = getattr(commands, args.command.replace('-', '_'))()
        text = table if args.format == 'csv' else dumps(payload)
        emit(text, args.out, stdout)
        return code
    except DomainError as e:
        logger.error('%s: %s', type(e).__name__, e)
        return EXIT_DOMAIN
    except (InputError, ConfigurationError) as e:
        logger.error('%s: %s', type(e).__name__, e)
        return EXIT_USAGE
    except WasserlabError as e:
        logger.error('%s: %s', type(e).__name__, e)
        return EXIT_FAIL


def main():
    raise SystemExit(run())
