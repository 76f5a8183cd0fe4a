# encoding: utf-8

"""
Plots
=====

Counts per bin against phase, with the fitted sinusoid on top,
written as SVG with svgwrite_.
When the configuration has a non-trivial actuator map, the x axis is
labeled in actuator units instead of radians.

.. _svgwrite: https://svgwrite.readthedocs.io

.. code-block:: py

   import qcheshire.plot as plot

"""

import logging

import numpy as np
from svgwrite import Drawing

logger = logging.getLogger(__name__)

WIDTH, HEIGHT = 640, 400
MARGIN = 60
TICKS = 5


class _Frame:
    'Maps data coordinates to the drawing area.'

    def __init__(self, xs, ys):
        self.x0, self.x1 = float(np.min(xs)), float(np.max(xs))
        lo, hi = float(np.min(ys)), float(np.max(ys))
        pad = 0.1 * (hi - lo) if hi > lo else max(abs(hi), 1.0) * 0.1
        self.y0, self.y1 = max(lo - pad, 0.0), hi + pad
        if self.x1 == self.x0:
            self.x1 = self.x0 + 1

    def x(self, v):
        return MARGIN + (v - self.x0) / (self.x1 - self.x0) * (WIDTH - 2 * MARGIN)

    def y(self, v):
        return HEIGHT - MARGIN - (v - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2 * MARGIN)


def _axes(d, frame, xlabel, ylabel, to_axis):
    left, bottom = MARGIN, HEIGHT - MARGIN
    d.add(d.line((left, bottom), (WIDTH - MARGIN, bottom), stroke='black'))
    d.add(d.line((left, bottom), (left, MARGIN), stroke='black'))
    for v in np.linspace(frame.x0, frame.x1, TICKS):
        x = frame.x(v)
        d.add(d.line((x, bottom), (x, bottom + 5), stroke='black'))
        d.add(d.text('{:.3g}'.format(float(to_axis(v))), insert=(x - 10, bottom + 20),
                     font_size=11))
    for v in np.linspace(frame.y0, frame.y1, TICKS):
        y = frame.y(v)
        d.add(d.line((left - 5, y), (left, y), stroke='black'))
        d.add(d.text('{:.4g}'.format(float(v)), insert=(4, y + 4), font_size=11))
    d.add(d.text(xlabel, insert=(WIDTH / 2 - 40, HEIGHT - 15), font_size=13))
    d.add(d.text(ylabel, insert=(4, MARGIN - 20), font_size=13))


def counts_svg(records, fit=None, cfg=None, path=None, title=''):
    '''
    Scatter of the count records, the fit curve when ``fit`` is given.
    Returns the ``svgwrite.Drawing``; saves it when ``path`` is given.
    '''
    phases = np.array([r.phase for r in records], dtype=float)
    counts = np.array([r.counts for r in records], dtype=float)
    dense = np.linspace(phases.min(), phases.max(), 200)
    ys = counts if fit is None else np.concatenate([counts, fit.curve(dense)])
    frame = _Frame(phases, ys)
    actuator = cfg is not None and (cfg.actuator_offset != 0 or cfg.actuator_scale != 1)
    if actuator:
        to_axis, xlabel = cfg.actuator_position, 'actuator position'
    else:
        to_axis, xlabel = (lambda v: v), 'phase (rad)'
    d = Drawing(path or 'counts.svg', size=(WIDTH, HEIGHT))
    d.add(d.rect((0, 0), (WIDTH, HEIGHT), fill='white'))
    _axes(d, frame, xlabel, 'counts per bin', to_axis)
    if title:
        d.add(d.text(title, insert=(MARGIN, 25), font_size=14))
    for x, y in zip(phases, counts):
        d.add(d.circle((frame.x(x), frame.y(y)), r=2.5, fill='steelblue'))
    if fit is not None:
        points = [(frame.x(x), frame.y(y)) for x, y in zip(dense, fit.curve(dense))]
        d.add(d.polyline(points, stroke='firebrick', fill='none', stroke_width=1.5))
        d.add(d.text('V = {:.3f}'.format(fit.visibility), insert=(WIDTH - MARGIN - 80, MARGIN),
                     font_size=12))
    if path is not None:
        d.save()
        logger.info('wrote %s', path)
    return d

# vim: ts=4 sw=4 sts=4 et noai nocin nosi
