"""Command-line interface.

Subcommands build subgroup cores and Schreier-graph windows, answer
membership and filtration queries, search for matching-condition
violations, and assemble the two tower constructions.  Certificates are
exchanged as JSON files carrying enough provenance to rebuild their
window and re-verify the claim from scratch (see the ``verify``
subcommand).

Exit codes: 0 for success (including SATISFIED verdicts and verified
builds), 2 when the requested search produced a verified negative
certificate (a violation was found; a successful outcome, distinguished
so sweeps can script over it), 1 for errors and failed verifications.

Every run is deterministic: output bytes depend only on the effective
configuration.  ``--config FILE`` loads a JSON object whose entries
override the corresponding command-line flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import filtration, paradox, schreier, stallings, towers
from .errors import NotFound, ShapeError, TarskicertError, UnresolvedTranslate
from .freewords import Alphabet, alphabet as default_alphabet, inv, nielsen_reduce
from .paradox import SATISFIED, HallViolation, TranslatingSets, make_decomposition
from .schreier import FRONTIER_EXIT, Window, expand, trace
from .stallings import AbelianMap, core_graph

OK, VIOLATION_FOUND, ERROR = 0, 2, 1

# --- plumbing ---------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; our 2 means 'violation found'."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(ERROR)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _infer_names(texts) -> list:
    seen: list = []
    for t in texts:
        if not t:
            continue
        for token in t.replace(",", " ").split():
            name = token.split("^")[0]
            if name and name != "1" and name not in seen:
                seen.append(name)
    return seen


def _alph(args, texts=()) -> Alphabet:
    names = getattr(args, "alphabet", None)
    if names:
        return Alphabet(tuple(names.split()))
    inferred = _infer_names(texts)
    if inferred:
        return Alphabet(tuple(inferred))
    return default_alphabet(3)


def _parse_words(alph: Alphabet, text: str) -> tuple:
    return tuple(alph.parse(part) for part in text.split(",") if part.strip())


def _format_words(alph: Alphabet, words) -> list:
    return [alph.format(w) for w in words]


def _load_config(args, parser: argparse.ArgumentParser) -> None:
    if not getattr(args, "config", None):
        return
    try:
        raw = json.loads(Path(args.config).read_text())
    except json.JSONDecodeError as e:
        parser.error(f"config file is not valid JSON: {e}")
        return
    if not isinstance(raw, dict):
        parser.error("config file must hold a JSON object")
        return
    for key, value in raw.items():
        dest = key.replace("-", "_")
        if dest == "config" or not hasattr(args, dest):
            parser.error(f"unknown config key {key!r}")
        setattr(args, dest, value)


# --- window provenance ------------------------------------------------------


def _fg_provenance(args, alph: Alphabet, gens) -> dict:
    prov = {
        "oracle": "gamma2" if getattr(args, "gamma2", False) else "fg",
        "alphabet": list(alph.names),
        "gens": _format_words(alph, gens),
        "radius": args.radius,
        "budget": args.budget,
    }
    conj = getattr(args, "conjugator", None)
    if conj:
        prov["conjugator"] = alph.format(alph.parse(conj))
    return prov


def _window_from_fg_provenance(prov: dict):
    alph = Alphabet(tuple(prov["alphabet"]))
    gens = alph.parse_tuple(prov["gens"])
    core = core_graph(alph.rank, gens)
    if prov["oracle"] == "gamma2":
        oracle = schreier.oracle_gamma2(core, AbelianMap(core))
    else:
        oracle = schreier.oracle_fg(core)
    conj = prov.get("conjugator")
    if conj:
        oracle = schreier.oracle_conjugate(oracle, alph.parse(conj))
    window = expand(oracle, prov["radius"], budget=prov.get("budget", 1 << 20))
    return window, alph


def _rebuild_window(prov: dict):
    """Window and alphabet from a certificate's provenance block."""
    kind = prov.get("oracle")
    if kind in ("fg", "gamma2"):
        return _window_from_fg_provenance(prov)
    if kind == "tarski_tower":
        window, spec = towers.build_tarski_tower(
            prov["n"], prov["count"], prov["radius"],
            budget=prov.get("budget", 1 << 20))
        return window, _tower_alphabet(prov["n"])
    if kind == "filtration_tower":
        window, spec = towers.build_filtration_tower(
            prov["p"], prov["nMax"], prov["pairs"], prov["radius"],
            budget=prov.get("budget", 1 << 20))
        return window, default_alphabet(3)
    raise ShapeError(f"cannot rebuild a window from oracle kind {kind!r}")


def _tower_alphabet(n: int) -> Alphabet:
    return Alphabet(("x",) + tuple(f"y{i}" for i in range(1, n + 1)) + ("z",))


def _window_json(window: Window, alph: Alphabet, prov: dict) -> dict:
    doc = schreier.export_json(window, alph)
    doc["provenance"] = prov
    return doc


# --- core-family subcommands -------------------------------------------------


def cmd_core(args) -> int:
    alph = _alph(args, [args.gens])
    gens = _parse_words(alph, args.gens)
    core = core_graph(alph.rank, gens)
    if args.dot:
        _emit(stallings.core_to_dot(core, alph), args.out)
    elif args.json:
        _emit(_json_text(stallings.core_to_json(core, alph)), args.out)
    else:
        idx = core.index()
        lines = [
            f"vertices: {core.nv}",
            f"rank: {core.graph_rank()}",
            f"index: {'infinite' if idx is None else idx}",
        ]
        _emit("\n".join(lines) + "\n", args.out)
    return OK


def cmd_member(args) -> int:
    alph = _alph(args, [args.gens, args.word])
    gens = _parse_words(alph, args.gens)
    core = core_graph(alph.rank, gens)
    word = alph.parse(args.word)
    _emit(("true" if core.member(word) else "false") + "\n", args.out)
    return OK


def cmd_intersect(args) -> int:
    alph = _alph(args, [args.gens, args.gens2])
    core = stallings.intersect(
        core_graph(alph.rank, _parse_words(alph, args.gens)),
        core_graph(alph.rank, _parse_words(alph, args.gens2)),
    )
    if args.dot:
        _emit(stallings.core_to_dot(core, alph), args.out)
    elif args.json:
        _emit(_json_text(stallings.core_to_json(core, alph)), args.out)
    else:
        idx = core.index()
        _emit(f"vertices: {core.nv}\nrank: {core.graph_rank()}\n"
              f"index: {'infinite' if idx is None else idx}\n", args.out)
    return OK


def cmd_rank(args) -> int:
    alph = _alph(args, [args.gens])
    core = core_graph(alph.rank, _parse_words(alph, args.gens))
    _emit(f"{core.graph_rank()}\n", args.out)
    return OK


def cmd_index(args) -> int:
    alph = _alph(args, [args.gens])
    core = core_graph(alph.rank, _parse_words(alph, args.gens))
    idx = core.index()
    _emit(("infinite" if idx is None else str(idx)) + "\n", args.out)
    return OK


def cmd_nielsen(args) -> int:
    alph = _alph(args, [args.gens])
    reduced = nielsen_reduce(_parse_words(alph, args.gens))
    _emit(", ".join(_format_words(alph, reduced)) + "\n", args.out)
    return OK


# --- filtration subcommands ---------------------------------------------------


def cmd_zassenhaus(args) -> int:
    alph = _alph(args, [args.word])
    word = alph.parse(args.word)
    member = filtration.zassenhaus_member(word, args.n, args.p)
    if args.json:
        _emit(_json_text({
            "kind": "filtration-membership",
            "word": alph.format(word),
            "n": args.n,
            "p": args.p,
            "member": member,
        }), args.out)
    else:
        _emit(("true" if member else "false") + "\n", args.out)
    return OK


def cmd_findm(args) -> int:
    alph = default_alphabet(args.rank)
    result = filtration.find_m(args.n, args.p, m_max=args.mmax, rank=args.rank)
    cert = {
        "kind": "findm",
        "n": args.n,
        "p": args.p,
        "rank": args.rank,
        "m": result.m,
        "radius": result.cert.radius,
        "checkedCount": result.cert.checked_count,
        "failures": [f.to_json(alph) for f in result.failures],
    }
    if args.json:
        _emit(_json_text(cert), args.out)
    else:
        lines = [f"m({args.n}) = {result.m} at p = {args.p} "
                 f"(scanned {result.cert.checked_count} words of length "
                 f"<= {result.cert.radius})"]
        for f in result.failures:
            lines.append(f"  m = {f.m} fails: witness {alph.format(f.witness)}")
        _emit("\n".join(lines) + "\n", args.out)
    if args.cert_out:
        Path(args.cert_out).write_text(_json_text(cert))
    return OK


# --- window subcommand ---------------------------------------------------------


def cmd_expand(args) -> int:
    alph = _alph(args, [args.gens])
    gens = _parse_words(alph, args.gens)
    prov = _fg_provenance(args, alph, gens)
    window, _ = _window_from_fg_provenance(prov)
    if args.dot:
        _emit(schreier.export_dot(window, alph), args.out)
    elif args.json:
        _emit(_json_text(_window_json(window, alph, prov)), args.out)
    else:
        _emit(f"vertices: {window.n_vertices}\n"
              f"interior: {len(window.interior())}\n"
              f"frontier: {len(window.frontier)}\n", args.out)
    return OK


# --- paradox subcommands --------------------------------------------------------


def _hall_cert(prov: dict, alph: Alphabet, ts: TranslatingSets,
               violation: HallViolation) -> dict:
    return {
        "kind": "hall_violation",
        "window": prov,
        "sets": ts.to_json(alph),
        "data": violation.to_json(),
    }


def cmd_paradox_hall(args) -> int:
    alph = _alph(args, [args.gens, args.s1, args.s2])
    gens = _parse_words(alph, args.gens)
    prov = _fg_provenance(args, alph, gens)
    window, _ = _window_from_fg_provenance(prov)
    ts = TranslatingSets.make(_parse_words(alph, args.s1),
                              _parse_words(alph, args.s2))
    if args.pool:
        pool = [int(v) for v in args.pool.split(",")]
    else:
        pool = window.interior()[: args.pool_size]
    search = paradox.exhaustive_hall_search if args.exhaustive else paradox.hall_check
    verdict = search(window, ts, pool)
    if verdict == SATISFIED:
        _emit("SATISFIED\n", args.out)
        return OK
    _emit(_json_text(_hall_cert(prov, alph, ts, verdict)), args.out)
    return VIOLATION_FOUND


def cmd_paradox_powercycles(args) -> int:
    alph = _alph(args, [args.a, args.b, args.c])
    a, b, c = alph.parse(args.a), alph.parse(args.b), alph.parse(args.c)
    core, a1, a2, violation = paradox.power_cycle_violation(
        a, b, c, args.r, rank=alph.rank)
    prov = {
        "oracle": "power_cycle_core",
        "alphabet": list(alph.names),
        "a": alph.format(a),
        "b": alph.format(b),
        "c": alph.format(c),
        "r": args.r,
    }
    ts = TranslatingSets.make(
        [(), a], [(), b, c])
    _emit(_json_text(_hall_cert(prov, alph, ts, violation)), args.out)
    return VIOLATION_FOUND


def cmd_paradox_folner(args) -> int:
    def parse_vecs(text: str) -> list:
        vecs = []
        for part in text.split(";"):
            part = part.strip()
            if part:
                vecs.append(tuple(int(t) for t in part.replace(",", " ").split()))
        return vecs

    s1, s2 = parse_vecs(args.s1), parse_vecs(args.s2)
    try:
        violation = paradox.folner_violation(s1, s2, m_max=args.mmax)
    except NotFound:
        _emit(f"SATISFIED up to boxes of side {args.mmax}\n", args.out)
        return OK
    cert = {
        "kind": "hall_violation",
        "window": {"oracle": "integer_lattice", "dim": len(s1[0])},
        "sets": {"S1vecs": [list(v) for v in s1],
                 "S2vecs": [list(v) for v in s2]},
        "data": {
            "kind": "hall_violation",
            "space": violation.space,
            "A1": sorted(list(v) for v in violation.a1),
            "A2": sorted(list(v) for v in violation.a2),
            "unionSize": violation.union_size,
            "required": violation.required,
        },
    }
    _emit(_json_text(cert), args.out)
    return VIOLATION_FOUND


def cmd_paradox_verify(args) -> int:
    cert = json.loads(Path(args.cert).read_text())
    ok, message = _verify_cert(cert)
    _emit(message + "\n", args.out)
    return OK if ok else ERROR


# --- tower subcommands -----------------------------------------------------------


def _single_letter_candidates(alph: Alphabet) -> list:
    letters = [(d,) for d in alph.letters]
    return [TranslatingSets.make([(), g], [(), h])
            for g in letters for h in letters]


def cmd_tower(args) -> int:
    alph = _tower_alphabet(args.n)
    window, spec = towers.build_tarski_tower(
        args.n, args.tuples, args.radius, budget=args.budget)
    prov = {
        "oracle": "tarski_tower",
        "n": args.n,
        "count": args.tuples,
        "radius": args.radius,
        "budget": args.budget,
    }
    part = towers.partition_Y(window, spec)
    lines = [
        f"tower: n={args.n} tuples={args.tuples} radius={args.radius}",
        f"window: {window.n_vertices} vertices, "
        f"{len(window.interior())} interior",
    ]
    for i in sorted(spec.regions):
        region = spec.regions[i]
        words = ", ".join(alph.format(w) for w in region.words)
        lines.append(f"region {i}: tuple ({words}) class {region.j} "
                     f"doorway {alph.letter_name(region.c)}")
    sizes = {j: len(part.members(j)) for j in sorted(set(part.assignment.values()))}
    lines.append("partition: " + " ".join(f"Y{j}={k}" for j, k in sizes.items()))

    ok = True
    for j in sorted(sizes):
        report = towers.verify_free_on_Yj(window, part, j, args.free_length)
        ok = ok and report.ok
        lines.append(
            f"free action on Y{j}: {'ok' if report.ok else 'FIXED POINT'} "
            f"({report.vertices} vertices, {report.words} words of length "
            f"<= {report.max_len})")

    decomposition = towers.tarski_upper_decomposition(window, part, args.n)
    report = paradox.verify_decomposition(window, decomposition)
    ok = ok and report.ok
    piece_sizes = " ".join(
        f"{tag}={len(decomposition.pieces.get(tag, ()))}"
        for tag in paradox.piece_tags(decomposition.sets))
    lines.append(f"upper decomposition: {len(decomposition.pieces)} pieces "
                 f"({piece_sizes})")
    lines.append(
        f"verify: {'ok' if report.ok else 'FAILED'} checked={report.checked} "
        f"unverifiable={report.unverifiable}")

    candidates = _single_letter_candidates(alph)
    lower = towers.tarski_lower_report(spec, candidates, m_max=args.mmax)
    lines.append(f"lower-bound sweep: {len(lower)} candidates of total size 4")
    for cand in lower:
        s1 = "{" + ", ".join(alph.format(w) for w in cand.s1) + "}"
        s2 = "{" + ", ".join(alph.format(w) for w in cand.s2) + "}"
        if cand.status == towers.TRANSPORTED:
            v = cand.violation
            lines.append(f"  S1={s1} S2={s2}: tuple {cand.index} "
                         f"violated, union {v.union_size} < {v.required}")
        else:
            lines.append(f"  S1={s1} S2={s2}: {cand.status}")
    transported = sum(1 for c in lower if c.status == towers.TRANSPORTED)
    lines.append(f"violations transported: {transported}")
    lines.append("verdict: " + ("ok" if ok else "FAILED"))
    text = "\n".join(lines) + "\n"

    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "report.txt").write_text(text)
        (outdir / "decomposition.json").write_text(_json_text({
            "kind": "decomposition",
            "window": prov,
            "data": decomposition.to_json(alph),
        }))
        (outdir / "lower_report.json").write_text(_json_text({
            "kind": "lower-bound-report",
            "window": prov,
            "candidates": [c.to_json(alph) for c in lower],
        }))
        (outdir / "spec.json").write_text(_json_text({
            "kind": "tower-structure",
            "window": prov,
            "tuples": [[alph.format(w) for w in t] for t in spec.tuples],
            "doorways": {str(i): alph.letter_name(spec.c_letters[i])
                         for i in sorted(spec.c_letters)},
            "classes": {str(i): spec.regions[i].j
                        for i in sorted(spec.regions)},
        }))
        if args.export_window:
            (outdir / "window.json").write_text(
                _json_text(_window_json(window, alph, prov)))
    sys.stdout.write(text)
    return OK if ok else ERROR


def cmd_filtertower(args) -> int:
    alph = default_alphabet(3)
    window, spec = towers.build_filtration_tower(
        args.p, args.nmax, args.pairs, args.radius, budget=args.budget)
    prov = {
        "oracle": "filtration_tower",
        "p": args.p,
        "nMax": args.nmax,
        "pairs": args.pairs,
        "radius": args.radius,
        "budget": args.budget,
    }
    report = towers.verify_filtration_tower(
        window, spec, samples=args.samples, seed=args.seed)
    lines = [
        f"filtration tower: p={args.p} nMax={args.nmax} pairs={args.pairs} "
        f"radius={args.radius}",
        f"window: {window.n_vertices} vertices, "
        f"{len(window.interior())} interior; core: {spec.core.nv} vertices",
        f"levels: " + " ".join(f"m({n})={m}" for n, m in
                               sorted(spec.m_values.items())),
    ]
    for key in sorted(spec.tuples):
        words = ", ".join(alph.format(w) for w in spec.tuples[key])
        lines.append(f"automaton {key}: tuple ({words}) girth >= "
                     f"{report.girths[key]}, attachment indegree "
                     f"{report.attachment_indegrees[key]}")
    v, d, bound = report.deficient_vertex
    lines.append(f"deficient vertex: {v} with degree {d} < {bound}")
    lines.append(f"spine labels ok: {report.spine_ok}")
    lines.append(f"fixed points verified: {len(report.fixed_points)}")
    lines.append(f"filtration memberships verified: "
                 f"{len(report.membership_checks)}")
    lines.append(f"doubling: forest of {len(report.doubling.forest)} edges, "
                 f"{report.doubling_samples} random subsets doubled")
    pc = report.power_cycle
    lines.append(f"power-cycle violation: union {pc.union_size} < "
                 f"{pc.required}")
    lines.append("verdict: " + ("ok" if report.ok else "FAILED"))
    text = "\n".join(lines) + "\n"

    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "report.txt").write_text(text)
        (outdir / "report.json").write_text(_json_text({
            "kind": "filtration-tower-report",
            "window": prov,
            "data": report.to_json(alph),
        }))
        (outdir / "core.json").write_text(
            _json_text(stallings.core_to_json(spec.core, alph)))
        window_edges = {
            (v, d, window.trans[v][d])
            for v in range(window.n_vertices)
            for d in range(0, 2 * window.rank, 2)
            if window.trans[v][d] >= 0
        }
        removed = sorted(window_edges - report.doubling.forest)
        (outdir / "doubling.json").write_text(_json_text({
            "kind": "doubling_cert",
            "window": prov,
            "data": {
                "sWords": ["x", "y", "z"],
                "removedWindowEdges": [list(e) for e in removed],
                "forestEdges": len(report.doubling.forest),
                "minInteriorIndegree": min(
                    report.doubling.indegree_table.values(), default=0),
            },
        }))
        if args.export_window:
            (outdir / "window.json").write_text(
                _json_text(_window_json(window, alph, prov)))
    sys.stdout.write(text)
    return OK if report.ok else ERROR


# --- certificate verification -----------------------------------------------


def _recheck_hall_window(cert: dict) -> tuple:
    window, alph = _rebuild_window(cert["window"])
    s1 = alph.parse_tuple(cert["sets"]["S1"])
    s2 = alph.parse_tuple(cert["sets"]["S2"])
    data = cert["data"]
    a1, a2 = data["A1"], data["A2"]
    union = set()
    for vs, words in ((a1, s1), (a2, s2)):
        for v in vs:
            for s in words:
                t = trace(window, v, inv(s))
                if t == FRONTIER_EXIT:
                    raise UnresolvedTranslate(
                        f"translate of vertex {v} leaves the window")
                union.add(t)
    required = len(set(a1)) + len(set(a2))
    if len(union) != data["unionSize"] or required != data["required"]:
        return False, (f"stored sizes {data['unionSize']}/{data['required']} "
                       f"disagree with recomputed {len(union)}/{required}")
    if len(union) >= required:
        return False, f"no violation: union {len(union)} >= {required}"
    return True, f"hall violation re-verified: union {len(union)} < {required}"


def _recheck_hall_core(cert: dict) -> tuple:
    prov = cert["window"]
    alph = Alphabet(tuple(prov["alphabet"]))
    core, a1, a2, violation = paradox.power_cycle_violation(
        alph.parse(prov["a"]), alph.parse(prov["b"]), alph.parse(prov["c"]),
        prov["r"], rank=alph.rank)
    data = cert["data"]
    if set(a1) != set(data["A1"]) or set(a2) != set(data["A2"]):
        return False, "stored vertex sets disagree with the rebuilt core"
    if (violation.union_size != data["unionSize"]
            or violation.required != data["required"]):
        return False, "stored sizes disagree with the rebuilt violation"
    return True, (f"hall violation re-verified: union {violation.union_size} "
                  f"< {violation.required}")


def _recheck_hall_lattice(cert: dict) -> tuple:
    data = cert["data"]
    s1 = [tuple(v) for v in cert["sets"]["S1vecs"]]
    s2 = [tuple(v) for v in cert["sets"]["S2vecs"]]
    a1 = [tuple(v) for v in data["A1"]]
    a2 = [tuple(v) for v in data["A2"]]
    union = set()
    for vs, vecs in ((a1, s1), (a2, s2)):
        for a in vs:
            for s in vecs:
                union.add(tuple(x - y for x, y in zip(a, s)))
    required = len(set(a1)) + len(set(a2))
    if len(union) != data["unionSize"] or required != data["required"]:
        return False, "stored sizes disagree with recomputation"
    if len(union) >= required:
        return False, f"no violation: union {len(union)} >= {required}"
    return True, f"hall violation re-verified: union {len(union)} < {required}"


def _verify_hall(cert: dict) -> tuple:
    space = cert["data"].get("space", "window")
    if space == "window":
        return _recheck_hall_window(cert)
    if space == "core":
        return _recheck_hall_core(cert)
    if space == "lattice":
        return _recheck_hall_lattice(cert)
    raise ShapeError(f"unknown violation space {space!r}")


def _verify_decomposition_cert(cert: dict) -> tuple:
    window, alph = _rebuild_window(cert["window"])
    data = cert["data"]
    ts = TranslatingSets.make(alph.parse_tuple(data["sets"]["S1"]),
                              alph.parse_tuple(data["sets"]["S2"]))
    d = make_decomposition(ts, {tag: frozenset(vs)
                                for tag, vs in data["pieces"].items()})
    report = paradox.verify_decomposition(window, d)
    if report.ok:
        return True, (f"decomposition re-verified on {report.checked} "
                      f"interior vertices ({report.unverifiable} unverifiable)")
    return False, f"decomposition fails: {report.problems[0]}"


def _verify_window_cert(cert: dict) -> tuple:
    window, alph = _rebuild_window(cert["provenance"])
    rebuilt = _window_json(window, alph, cert["provenance"])
    for key in ("vertices", "frontier", "reps", "edges"):
        if rebuilt[key] != cert[key]:
            return False, f"rebuilt window disagrees at {key!r}"
    return True, (f"window re-verified: {window.n_vertices} vertices, "
                  f"byte-identical rebuild")


def _verify_findm_cert(cert: dict) -> tuple:
    alph = default_alphabet(cert.get("rank", 3))
    n, p = cert["n"], cert["p"]
    for f in cert["failures"]:
        word = alph.parse(f["witness"])
        if not word or len(word) > 2 * f["radius"]:
            return False, f"witness for m = {f['m']} has the wrong length"
        if not filtration.zassenhaus_member(word, f["m"], p):
            return False, f"witness for m = {f['m']} is not a member"
    result = filtration.certify_min_length(cert["m"], n, p,
                                           rank=cert.get("rank", 3))
    if not result.passed:
        return False, f"level {cert['m']} no longer passes the scan"
    if result.checked_count != cert["checkedCount"]:
        return False, "scan count disagrees with the stored certificate"
    return True, (f"findm certificate re-verified: m({n}) = {cert['m']} "
                  f"at p = {p}, {len(cert['failures'])} failure witnesses")


class _Erasure:
    def __init__(self, edges):
        self.removed_edges = tuple(tuple(e) for e in edges)


def _verify_doubling_cert(cert: dict) -> tuple:
    window, alph = _rebuild_window(cert["window"])
    data = cert["data"]
    s_words = alph.parse_tuple(data["sWords"])
    shims = ()
    if data.get("removedWindowEdges"):
        shims = (_Erasure(data["removedWindowEdges"]),)
    rebuilt = paradox.forest_doubling_cert(window, s_words, sparse_trees=shims)
    if len(rebuilt.forest) != data["forestEdges"]:
        return False, "forest size disagrees with the stored certificate"
    return True, (f"doubling certificate re-verified: forest of "
                  f"{len(rebuilt.forest)} edges")


def _verify_cert(cert: dict) -> tuple:
    kind = cert.get("kind")
    if kind == "hall_violation":
        return _verify_hall(cert)
    if kind == "decomposition":
        return _verify_decomposition_cert(cert)
    if kind == "window":
        return _verify_window_cert(cert)
    if kind == "findm":
        return _verify_findm_cert(cert)
    if kind == "doubling_cert":
        return _verify_doubling_cert(cert)
    raise ShapeError(f"unknown certificate kind {kind!r}")


def cmd_verify(args) -> int:
    cert = json.loads(Path(args.cert).read_text())
    ok, message = _verify_cert(cert)
    _emit(message + "\n", args.out)
    return OK if ok else ERROR


# --- argument tree -----------------------------------------------------------


def _add_common(p, out=True):
    p.add_argument("--config", help="JSON file whose entries override flags")
    if out:
        p.add_argument("--out", help="write output to this file instead of stdout")


def _add_alphabet(p):
    p.add_argument("--alphabet",
                   help="space-separated generator names (default: inferred)")


def _add_window_flags(p):
    p.add_argument("--radius", type=int, default=4, help="window radius")
    p.add_argument("--budget", type=int, default=1 << 20,
                   help="vertex budget for window expansion")
    p.add_argument("--gamma2", action="store_true",
                   help="use the derived subgroup of the given subgroup")
    p.add_argument("--conjugator",
                   help="conjugate the subgroup by this word")


def _add_format_flags(p):
    p.add_argument("--dot", action="store_true", help="emit DOT")
    p.add_argument("--json", action="store_true", help="emit JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tarskicert",
                     description="certified Tarski-number bounds for free "
                                 "group actions at finite truncation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("core", help="Stallings core of a subgroup")
    p.add_argument("--gens", required=True,
                   help="comma-separated generating words, e.g. 'x^2, y'")
    _add_alphabet(p)
    _add_format_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_core)

    p = sub.add_parser("member", help="subgroup membership of a word")
    p.add_argument("--gens", required=True)
    p.add_argument("--word", required=True)
    _add_alphabet(p)
    _add_common(p)
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("intersect", help="core of the intersection of two subgroups")
    p.add_argument("--gens", required=True)
    p.add_argument("--gens2", required=True)
    _add_alphabet(p)
    _add_format_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_intersect)

    p = sub.add_parser("rank", help="rank of a subgroup")
    p.add_argument("--gens", required=True)
    _add_alphabet(p)
    _add_common(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("index", help="index of a subgroup (or 'infinite')")
    p.add_argument("--gens", required=True)
    _add_alphabet(p)
    _add_common(p)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("nielsen", help="Nielsen-reduce a generating tuple")
    p.add_argument("--gens", required=True)
    _add_alphabet(p)
    _add_common(p)
    p.set_defaults(func=cmd_nielsen)

    p = sub.add_parser("zassenhaus",
                       help="mod-p filtration membership of a word")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True, help="filtration level")
    p.add_argument("--word", required=True)
    p.add_argument("--json", action="store_true")
    _add_alphabet(p)
    _add_common(p)
    p.set_defaults(func=cmd_zassenhaus)

    p = sub.add_parser("findm",
                       help="least level whose members need length > 12n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--rank", type=int, default=3)
    p.add_argument("--mmax", type=int, default=24)
    p.add_argument("--json", action="store_true")
    p.add_argument("--cert-out", help="also write the JSON certificate here")
    _add_common(p)
    p.set_defaults(func=cmd_findm)

    p = sub.add_parser("expand", help="BFS window of a Schreier graph")
    p.add_argument("--gens", required=True)
    _add_alphabet(p)
    _add_window_flags(p)
    _add_format_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("paradox", help="matching-condition tools")
    psub = p.add_subparsers(dest="paradox_command", required=True)

    q = psub.add_parser("hall", help="matching check over a window")
    q.add_argument("--gens", required=True)
    q.add_argument("--s1", required=True, help="first translating set")
    q.add_argument("--s2", required=True, help="second translating set")
    q.add_argument("--pool", help="comma-separated vertex ids")
    q.add_argument("--pool-size", type=int, default=8,
                   help="use the first K interior vertices (default 8)")
    q.add_argument("--exhaustive", action="store_true",
                   help="exhaustive subset search (pool of at most 12)")
    _add_alphabet(q)
    _add_window_flags(q)
    _add_common(q)
    q.set_defaults(func=cmd_paradox_hall)

    q = psub.add_parser("powercycles",
                        help="violation on the power-cycle coset space")
    q.add_argument("--a", required=True)
    q.add_argument("--b", required=True)
    q.add_argument("--c", required=True)
    q.add_argument("--r", type=int, default=4)
    _add_alphabet(q)
    _add_common(q)
    q.set_defaults(func=cmd_paradox_powercycles)

    q = psub.add_parser("folner", help="first violating box in a lattice")
    q.add_argument("--s1", required=True,
                   help="semicolon-separated integer vectors, e.g. '0 0; 1 0'")
    q.add_argument("--s2", required=True)
    q.add_argument("--mmax", type=int, default=64)
    _add_common(q)
    q.set_defaults(func=cmd_paradox_folner)

    q = psub.add_parser("verify", help="re-verify a certificate file")
    q.add_argument("--cert", required=True)
    _add_common(q)
    q.set_defaults(func=cmd_paradox_verify)

    p = sub.add_parser("tower",
                       help="diagonal tower: pieces bound above, sweeps below")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tuples", type=int, required=True,
                   help="number of realized tuples")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--budget", type=int, default=1 << 20)
    p.add_argument("--free-length", type=int, default=6,
                   help="verify freeness up to this word length")
    p.add_argument("--mmax", type=int, default=32,
                   help="box side bound for the lower-bound sweep")
    p.add_argument("--export-window", action="store_true",
                   help="also write window.json (large)")
    p.add_argument("--out", help="directory for report and certificates")
    p.add_argument("--config", help="JSON file whose entries override flags")
    p.set_defaults(func=cmd_tower)

    p = sub.add_parser("filtertower",
                       help="filtration tower: attach deep-level automata")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--pairs", type=int, required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--budget", type=int, default=1 << 20)
    p.add_argument("--samples", type=int, default=100,
                   help="random subsets for the doubling spot check")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--export-window", action="store_true")
    p.add_argument("--out", help="directory for report and certificates")
    p.add_argument("--config", help="JSON file whose entries override flags")
    p.set_defaults(func=cmd_filtertower)

    p = sub.add_parser("verify", help="re-verify a certificate file")
    p.add_argument("--cert", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else ERROR
    try:
        _load_config(args, parser)
        return args.func(args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else ERROR
    except TarskicertError as e:
        sys.stderr.write(f"error: {e}\n")
        return ERROR
    except (OSError, json.JSONDecodeError) as e:
        sys.stderr.write(f"error: {e}\n")
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
