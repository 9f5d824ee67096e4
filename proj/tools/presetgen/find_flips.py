"""Search for a short flip word realising a mapping class.

Meet-in-the-middle breadth-first search in the flip graph, with states
identified through the images of flipper's key curves.  Offline helper used
to produce the preset flip words; not part of the C++ build.
"""
import sys
import flipper


def key_of(enc, kcs):
    imgs = [enc(c) for c in kcs]
    n = enc.target_triangulation.zeta
    return tuple(sorted(tuple(img.geometric[i] for img in imgs) for i in range(n)))


def bfs(start, kcs, depth):
    seen = {key_of(start, kcs): [(start, [])]}
    frontier = [(start, [])]
    for _ in range(depth):
        nxt = []
        for enc, word in frontier:
            tri = enc.target_triangulation
            for e in tri.flippable_edges():
                if e < 0:
                    continue
                f = tri.encode_flip(e)
                new = f * enc
                k = key_of(new, kcs)
                bucket = seen.setdefault(k, [])
                bucket.append((new, word + [e]))
                if len(bucket) == 1:
                    nxt.append((new, word + [e]))
        frontier = nxt
    return seen


def search(surface, word, depth):
    S = flipper.load(surface)
    T = S.triangulation
    h = S.mapping_class(word)
    kcs = T.key_curves()
    fwd = bfs(T.id_encoding(), kcs, depth)
    bwd = bfs(h, kcs, depth)
    best = []
    for k, items in fwd.items():
        if k not in bwd:
            continue
        for encP, wordP in items:
            for encR, wordR in bwd[k]:
                # J o P = R for some isometry J
                for J in encP.target_triangulation.isometries_to(encR.target_triangulation):
                    if J.encode() * encP != encR:
                        continue
                    # h = R_flips^-1 o J o P ; conjugate J to the end.
                    labels = [e for e in wordP]
                    inv = {}
                    for i in range(T.zeta):
                        j = J.index_map[i]
                        inv[j] = i
                    tail = [inv[e] for e in reversed(wordR)]
                    full = labels + tail
                    best.append(full)
    return S, T, h, best


def realise(S, T, h, flips):
    enc = T.id_encoding()
    cur = T
    for e in flips:
        f = cur.encode_flip(e)
        enc = f * enc
        cur = f.target_triangulation
    for iso in cur.isometries_to(T):
        if iso.encode() * enc == h:
            return enc, iso
    return None, None


if __name__ == '__main__':
    surface, word, depth = sys.argv[1], sys.argv[2], int(sys.argv[3])
    S, T, h, cands = search(surface, word, depth)
    cands = sorted(set(tuple(c) for c in cands), key=len)
    for c in cands[:10]:
        enc, iso = realise(S, T, h, list(c))
        print(len(c), list(c), iso)
