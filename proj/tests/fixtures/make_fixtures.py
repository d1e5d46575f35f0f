"""Hand-encoded fixtures. Values computed here, independently of the C++ code."""
import json
import pathlib

HERE = pathlib.Path(__file__).parent


def write(name, doc):
    (HERE / name).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def edge(src, dst, arrow, tag):
    return {"src": src, "dst": dst, "arrow": arrow, "tag": sorted(tag, key=ORDER.index)}


# Three-party ring, p=101, g=2, a=3, b=4, c=5; tags entered by hand.
P, G = 101, 2
K = {"a": 3, "b": 4, "c": 5}
ORDER = ["A", "B", "C", "E"]
TOP = ORDER


def sel(*keys):
    e = 1
    for k in keys:
        e *= K[k]
    return {"op": "select", "value": pow(G, e, P)}


def pw(k):
    return {"op": "pow", "exp": K[k]}


ring_nodes = ["star", "g", "g^a", "g^b", "g^c", "g^ab", "g^bc", "g^ca", "g^abc"]
ring_edges = [
    edge("star", "g", sel(), TOP),
    edge("star", "g^a", sel("a"), ["A", "B", "E"]),
    edge("star", "g^b", sel("b"), ["B", "C", "E"]),
    edge("star", "g^c", sel("c"), ["C", "A", "E"]),
    edge("star", "g^ab", sel("a", "b"), ["B", "C", "E"]),
    edge("star", "g^bc", sel("b", "c"), ["C", "A", "E"]),
    edge("star", "g^ca", sel("c", "a"), ["A", "B", "E"]),
    edge("star", "g^abc", sel("a", "b", "c"), ["A", "B", "C"]),
    edge("g", "g^a", pw("a"), ["A"]),
    edge("g^c", "g^ca", pw("a"), ["A"]),
    edge("g^bc", "g^abc", pw("a"), ["A"]),
    edge("g", "g^b", pw("b"), ["B"]),
    edge("g^a", "g^ab", pw("b"), ["B"]),
    edge("g^ca", "g^abc", pw("b"), ["B"]),
    edge("g", "g^c", pw("c"), ["C"]),
    edge("g^b", "g^bc", pw("c"), ["C"]),
    edge("g^ab", "g^abc", pw("c"), ["C"]),
]


def ring_doc(edges):
    return {
        "version": "1",
        "algebra": {"kind": "modexp", "p": P},
        "participants": ORDER,
        "nodes": [{"id": n, "object": "unit" if n == "star" else "carrier"} for n in ring_nodes],
        "edges": edges,
    }


write("ring3.json", ring_doc(ring_edges))

# Same diagram with Alice's exponentiations leaked to Eve, before completion.
leaked = [dict(e, tag=["A", "E"]) if e["arrow"] == pw("a") else e for e in ring_edges]
write("ring3_leak_a.json", ring_doc(leaked))
write("ring3_leak_a_completed.json", ring_doc(
    [dict(e, tag=["A", "B", "C", "E"]) if e["dst"] == "g^abc" and e["src"] == "star" else e for e in leaked]))

# Square: a 4-step path against a public composite, over 2x2 matrices mod 7.
MOD = 7


def mul(x, y):
    return [[sum(x[i][k] * y[k][j] for k in range(2)) % MOD for j in range(2)] for i in range(2)]


M = {"a": [[1, 2], [0, 1]], "b": [[2, 0], [1, 1]], "c": [[1, 0], [3, 1]], "d": [[3, 1], [1, 0]]}
M["cb"] = mul(M["c"], M["b"])
M["dcba"] = mul(M["d"], mul(M["c"], mul(M["b"], M["a"])))
ORDER = ["V", "W", "X", "Y", "Z"]


def el(name):
    return {"op": "elem", "name": name}


square_edges = [
    edge("n0", "n1", el("a"), ["V", "W"]),
    edge("n1", "n2", el("b"), ["W", "X"]),
    edge("n2", "n3", el("c"), ["X", "Y"]),
    edge("n3", "n4", el("d"), ["Y", "Z"]),
    edge("n0", "n4", el("dcba"), ORDER),
]


def square_doc(edges):
    return {
        "version": "1",
        "algebra": {"kind": "matrix_monoid", "modulus": MOD, "dim": 2, "elements": M},
        "participants": ORDER,
        "nodes": [{"id": f"n{i}", "object": "dot"} for i in range(5)],
        "edges": edges,
    }


write("square.json", square_doc(square_edges))
write("square_cb.json", square_doc(square_edges + [edge("n1", "n3", el("cb"), ORDER)]))
