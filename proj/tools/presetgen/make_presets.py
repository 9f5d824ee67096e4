"""Write the preset catalog under presets/.

Offline helper: realises each flip word with flipper, builds the mapping
torus, and records low-precision shape seeds from SnapPy.  The C++ side only
reads the JSON it produces.
"""
import json
import os
import sys

import flipper
import snappy

sys.path.insert(0, os.path.dirname(__file__))
from find_flips import realise  # noqa: E402

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, '..', '..', 'presets')

S12_FACES = [[~5, ~4, ~3], [~2, 0, 4], [~1, 5, ~0], [1, 3, 2]]
S11_FACES = [[~2, ~1, ~0], [0, 2, 1]]

PAPER = [
    dict(name='fig8', surface='S_1_1', genus=1, punctures=1, word='aB',
         description='T_a T_b^-1 on the once-punctured torus (figure-eight knot complement)',
         faces=S11_FACES, edges=3, flips=[2, 1],
         expected=[dict(quantity='volume', value=2.029883212819307, tag='DERIVED',
                        note='hyperbolic volume of the figure-eight complement')]),
    dict(name='t09265', surface='S_1_2', genus=1, punctures=2, word='bbbbbaC',
         description='T_b^5 T_a T_c^-1 on the twice-punctured torus',
         faces=S12_FACES, edges=6, flips=[3, 1, 2, 0, 3, 2, 1, 2, 1, 2, 0],
         expected=[dict(quantity='abs_TK', order=3, value=13.444319, tag='PAPER'),
                   dict(quantity='abs_TK', order=5, value=31.451090, tag='PAPER'),
                   dict(quantity='abs_TK_over_abs_TCF', order=3, value=3 ** 0.5, tag='PAPER'),
                   dict(quantity='abs_TK_over_abs_TCF', order=5, value=5.0, tag='PAPER')]),
    dict(name='s254', surface='S_1_2', genus=1, punctures=2, word='Bacx',
         description='T_b^-1 T_a T_c X on the twice-punctured torus, X swapping the punctures',
         faces=S12_FACES, edges=6, flips=[2, 4, 3, 0, 2, 4, 1, 3],
         expected=[dict(quantity='abs_TK', order=3, value=4.19825, tag='PAPER'),
                   dict(quantity='abs_TCF', order=3, value=4.19825, tag='PAPER')]),
    dict(name='n950', surface='S_1_2', genus=1, punctures=2, word='aabC',
         description='T_a^2 T_b T_c^-1 on the twice-punctured torus (complement of the 9^2_50 link)',
         faces=S12_FACES, edges=6, flips=[1, 3, 4, 0, 2, 1, 3, 2],
         expected=[dict(quantity='trace_identity_epsilon', order=3, value=-1, tag='PAPER')]),
]


def label(x):
    return int(x)


def build(p):
    S = flipper.load(p['surface'])
    T = S.triangulation
    h = S.mapping_class(p['word'])
    enc, iso = realise(S, T, h, p['flips'])
    if enc is None:
        raise SystemExit('flip word does not realise ' + p['word'])
    # flipper's isometry maps the last triangulation onto the first
    relabel = [label(iso.label_map[i]) for i in range(p['edges'])]
    M = snappy.Manifold((iso.encode() * enc).bundle(veering=False, _safety=False).snappy_string())
    shapes = [complex(z) for z in M.tetrahedra_shapes('rect')]
    out = {k: p[k] for k in ('name', 'description', 'genus', 'punctures', 'faces', 'edges', 'flips')}
    out['flipper'] = dict(surface=p['surface'], word=p['word'])
    out['relabeling'] = relabel
    out['relabeling_tag'] = 'DERIVED'
    out['seeds'] = [dict(re=repr(z.real), im=repr(z.imag)) for z in shapes]
    out['seed_source'] = 'SnapPy tetrahedra_shapes of the layered bundle, double precision'
    out['volume'] = float(M.volume())
    out['expected'] = p['expected']
    return out


def gl1_presets():
    # Twice the intersection form on H_1 of the once-punctured torus; colors
    # ordered (surgery components..., h0, h1).  Conventions checked against the
    # intertwiner for n = 3, 5, 7, 9 with the abelian formula at q^2.
    def diagram(extra):
        # extra: list of (framing, linked_to) for added components; k links
        # h0 with +1 and h1 with -1
        m = 3 + len(extra)
        Q = [[0] * m for _ in range(m)]
        K = 0
        h0, h1 = m - 2, m - 1
        Q[K][h0] = Q[h0][K] = 1
        Q[K][h1] = Q[h1][K] = -1
        for j, (framing, linked) in enumerate(extra):
            c = 1 + j
            Q[c][c] = framing
            t = {'k': K, 'h0': h0, 'h1': h1}[linked]
            Q[c][t] += 1
            Q[t][c] += 1
        return Q

    A = [1, 0]
    B = [0, 1]
    out = []

    def add(name, description, extra, twists):
        out.append(dict(name=name, description=description, genus=1, punctures=1,
                        intersection=[[0, 1], [-1, 0]],
                        twist_word=[dict(curve=c, sign=s) for c, s in twists],
                        linking=diagram(extra), num_summed=1 + len(extra),
                        tag='DERIVED'))

    add('identity', 'identity of the once-punctured torus', [], [])
    add('Ta', 'positive twist along a', [(-1, 'h0')], [(A, 1)])
    add('Ta-', 'negative twist along a', [(1, 'h0')], [(A, -1)])
    add('Tb', 'positive twist along b', [(-1, 'k')], [(B, 1)])
    add('Tb-', 'negative twist along b', [(1, 'k')], [(B, -1)])
    add('TaTb', 'T_a T_b', [(-1, 'h0'), (-1, 'k')], [(A, 1), (B, 1)])
    add('TbTa', 'T_b T_a', [(-1, 'h1'), (-1, 'k')], [(B, 1), (A, 1)])
    add('TaTb-', 'T_a T_b^-1', [(-1, 'h0'), (1, 'k')], [(A, 1), (B, -1)])
    return out


def main():
    os.makedirs(OUT, exist_ok=True)
    for p in PAPER:
        data = build(p)
        with open(os.path.join(OUT, p['name'] + '.json'), 'w') as fh:
            json.dump(data, fh, indent=1)
    with open(os.path.join(OUT, 'gl1.json'), 'w') as fh:
        json.dump(gl1_presets(), fh, indent=1)


if __name__ == '__main__':
    main()
