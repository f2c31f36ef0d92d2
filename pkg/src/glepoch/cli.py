"""``glepoch`` command line: ingest, extract, transform, compare, report, synth.

Each stage writes plain files under ``--out`` and the next stage reads
them back, so stages can be rerun independently.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import discrepancy as dsc
from . import graphlet, ingest, report, temporal
from .graph_core import CollabGraph

log = logging.getLogger("glepoch")


class ConfigError(ValueError):
    pass


class DependencyError(RuntimeError):
    """A stage input produced by an earlier stage is missing."""


# -- configuration ----------------------------------------------------------

@dataclass
class RunConfig:
    corpus_dir: Path | None = None
    cache: Path | None = None
    epochs: list = field(default_factory=lambda: list(temporal.DEFAULT_EPOCHS))
    out: Path = Path("glepoch-out")
    threads: int = 0
    holder_p: float = 1.0
    include_sigma0: bool = True
    seed: int = 0
    # synth
    n: int = 1000
    span_years: int = 20
    start_year: int = 2000
    attach_exponent: float = 2.7
    team_dist: str = "geometric"
    team_mean: float = 6.5
    team_cap: int | None = None
    refs: float = 8.0
    new_author_prob: float = 0.4

    @property
    def cache_path(self) -> Path:
        if self.cache is not None:
            return self.cache
        env = os.environ.get(ingest.CACHE_ENV)
        return Path(env) / "corpus.lgc" if env else self.out / "corpus.lgc"

    @property
    def n_threads(self) -> int:
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)

    def discrepancy_config(self) -> dsc.DiscrepancyConfig:
        return dsc.DiscrepancyConfig(holder_p=self.holder_p, include_sigma0=self.include_sigma0)


_CONVERTERS = {
    "corpus_dir": Path, "cache": Path, "out": Path,
    "epochs": temporal.parse_epochs,
    "threads": int, "seed": int, "n": int, "span_years": int, "start_year": int,
    "holder_p": float, "attach_exponent": float, "team_mean": float, "refs": float,
    "new_author_prob": float,
    "team_dist": str,
    "team_cap": lambda s: None if str(s).lower() in ("", "none") else int(s),
    "include_sigma0": lambda s: str(s).strip().lower() in ("1", "true", "yes", "on"),
}


def read_config_file(path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{p}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONVERTERS:
            raise ConfigError(f"{p}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def resolve_config(args) -> RunConfig:
    raw = read_config_file(args.config) if args.config else {}
    for key in _CONVERTERS:
        v = getattr(args, key, None)
        if v is not None:
            raw[key] = v
    cfg = RunConfig()
    for key, value in raw.items():
        try:
            setattr(cfg, key, _CONVERTERS[key](value) if isinstance(value, str) else value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from None
    if cfg.threads < 0:
        raise ConfigError("threads must be >= 0")
    labels = [e.label for e in cfg.epochs]
    if len(set(labels)) != len(labels):
        raise ConfigError("epoch labels must be unique")
    if len({slug(x) for x in labels}) != len(labels):
        raise ConfigError("epoch labels collide after filename normalization")
    try:
        cfg.discrepancy_config()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def slug(label: str) -> str:
    return re.sub(r"[^0-9A-Za-z]+", "_", label).strip("_").lower() or "epoch"


# -- artifact helpers --------------------------------------------------------

def _require(path: Path) -> Path:
    if not path.exists():
        raise DependencyError(f"missing upstream artifact: {path}")
    return path


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _save_arrays(directory: Path, **arrays) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for name, arr in arrays.items():
        np.save(directory / f"{name}.npy", np.asarray(arr))


def _load(directory: Path, name: str) -> np.ndarray:
    return np.load(_require(directory / f"{name}.npy"))


def _epoch_index(cfg: RunConfig) -> list:
    path = _require(cfg.out / "extract" / "epochs.json")
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)["epochs"]


def _load_network(cfg: RunConfig, entry) -> temporal.CollabNetwork:
    d = cfg.out / "extract" / entry["slug"]
    g = CollabGraph(_load(d, "graph_indptr"), _load(d, "graph_indices"),
                    _load(d, "graph_key"), _load(d, "graph_weight"))
    return temporal.CollabNetwork(entry["label"], g, _load(d, "graph_cohort"))


def _load_field(cfg: RunConfig, entry) -> np.ndarray:
    return _load(cfg.out / "transform" / entry["slug"], "field")


def _load_corpus_cache(cfg: RunConfig) -> ingest.LiteratureGraph:
    return ingest.load_cache(_require(cfg.cache_path))


# -- commands ------------------------------------------------------------------

def cmd_ingest(cfg: RunConfig) -> dict:
    if cfg.corpus_dir is None:
        raise ConfigError("ingest needs --corpus-dir")
    for name in (ingest.ARTICLES_FILE, ingest.CITATIONS_FILE, ingest.AUTHORSHIP_FILE):
        _require(cfg.corpus_dir / name)
    lg = ingest.load_corpus_dir(cfg.corpus_dir)
    ingest.save_cache(lg, cfg.cache_path)
    summary = lg.summary()
    _write_json(cfg.out / "ingest_summary.json", summary)
    return summary


def cmd_extract(cfg: RunConfig) -> dict:
    lg = _load_corpus_cache(cfg)
    entries = []
    for ep in cfg.epochs:
        triad = temporal.extract_triad(lg, ep)
        part = temporal.septa_partition(lg, triad)
        net = temporal.build_epoch_collab(lg, triad, part)
        s = slug(ep.label)
        _save_arrays(cfg.out / "extract" / s,
                     core=triad.core, cout=triad.cout, cin=triad.cin,
                     edge_src=triad.edge_src, edge_dst=triad.edge_dst,
                     authors=part.authors, cohort=part.cohort,
                     graph_indptr=net.graph.indptr, graph_indices=net.graph.indices,
                     graph_key=net.graph.vertex_key, graph_weight=net.graph.weight,
                     graph_cohort=net.cohort)
        links = int(lg.authorship.to_scipy()[triad.articles].nnz) if triad.articles.size else 0
        meta = {"label": ep.label, "slug": s, "epoch": str(ep), **triad.sizes(),
                "articles": int(triad.articles.size), "authors": int(part.authors.size),
                "links": links, "cohort_sizes": part.sizes().tolist(),
                "collab_edges": net.graph.n_edges}
        _write_json(cfg.out / "extract" / s / "meta.json", meta)
        entries.append(meta)
    _write_json(cfg.out / "extract" / "epochs.json", {"epochs": entries})
    return {"epochs": [e["label"] for e in entries]}


def cmd_transform(cfg: RunConfig) -> dict:
    entries = _epoch_index(cfg)
    lg = _load_corpus_cache(cfg)
    keys = lg.authors.keys
    for e in entries:
        net = _load_network(cfg, e)
        f = graphlet.transform(net.graph, threads=cfg.n_threads)
        order = report.display_order(net.graph, net.cohort)
        spec = graphlet.spectrogram(f, order, net.boundaries)
        d = cfg.out / "transform" / e["slug"]
        _save_arrays(d, field=f, order=order)
        vkeys = [keys[k] for k in net.graph.vertex_key.tolist()]
        graphlet.export_spectrogram(spec, vkeys, net.cohort, d / "spectrogram.csv",
                                    d / "spectrogram.json")
    return {"transformed": [e["label"] for e in entries]}


def cmd_compare(cfg: RunConfig) -> dict:
    entries = _epoch_index(cfg)
    nets = [_load_network(cfg, e) for e in entries]
    fields = [_load_field(cfg, e) for e in entries]
    dcfg = cfg.discrepancy_config()
    agree, inter, reports = dsc.pairwise_table(nets, dcfg, fields, threads=cfg.n_threads)
    labels = [e["label"] for e in entries]
    out = cfg.out / "compare"
    out.mkdir(parents=True, exist_ok=True)
    dsc.write_pairwise_csv(labels, agree, inter, out / "agreement.csv")
    (out / "reports").mkdir(exist_ok=True)
    for (i, j), r in reports.items():
        r.write_json(out / "reports" / f"{entries[i]['slug']}__{entries[j]['slug']}.json",
                     include_nodes=False)
    for t in range(len(entries)):
        table = dsc.target_cohort_table(t, labels, reports)
        dsc.write_target_cohort_csv(table, out / f"cohort_{entries[t]['slug']}.csv")
    _write_json(out / "summary.json", {
        "labels": labels,
        "holder_p": cfg.holder_p if math.isfinite(cfg.holder_p) else str(cfg.holder_p),
        "include_sigma0": cfg.include_sigma0,
        "agreement": agree.tolist(),
        "intersection_sizes": inter.tolist(),
    })
    return {"pairs": len(reports)}


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def cmd_report(cfg: RunConfig) -> dict:
    entries = _epoch_index(cfg)
    nets = [_load_network(cfg, e) for e in entries]
    fields = [_load_field(cfg, e) for e in entries]
    orders = [_load(cfg.out / "transform" / e["slug"], "order") for e in entries]
    lg = _load_corpus_cache(cfg)
    keys = lg.authors.keys
    out = cfg.out / "report"
    out.mkdir(parents=True, exist_ok=True)
    spec = report.HistogramSpec()
    for e, net, f, order in zip(entries, nets, fields, orders):
        s = e["slug"]
        h = report.degree_histogram(f, spec)
        _write_rows(out / f"degree_hist_{s}.csv", ["bin_start", "count"],
                    zip(h.edges.tolist(), h.counts.tolist()))
        report.render_histogram_svg(h, out / f"degree_hist_{s}.svg", f"degree histogram: {e['label']}")
        curve = report.rank_size_curves(f, net.graph.vertex_key)
        _write_rows(out / f"rank_size_{s}.csv", ["rank", "vertex_key", "d1", "d2"],
                    ((r, keys[v], a, b) for r, v, a, b in zip(
                        curve.ranks.tolist(), curve.vertices.tolist(),
                        curve.d1_values.tolist(), curve.d2_values.tolist())))
        report.render_rank_size_svg(curve, out / f"rank_size_{s}.svg", f"rank-size: {e['label']}")
        sp = graphlet.spectrogram(f, order, net.boundaries)
        report.render_spectrogram_svg(sp, out / f"spectrogram_{s}.svg", f"spectrogram: {e['label']}")
        blocks, b = report.adjacency_blocks(net.graph.permute(order))
        report.render_heatmap_svg(blocks, out / f"adjacency_{s}.svg", net.boundaries, b,
                                  f"adjacency: {e['label']} ({b}x{b} per pixel)")
    sets, common = report.persistent_scatter(nets, fields)
    for st in sets:
        s = slug(st.label)
        hl = np.isin(st.keys, common)
        _write_rows(out / f"scatter_{s}.csv", ["vertex_key", "d1", "d2", "d4", "common"],
                    ((keys[k], a, b, c, int(h)) for k, a, b, c, h in zip(
                        st.keys.tolist(), st.d1.tolist(), st.d2.tolist(), st.d4.tolist(), hl.tolist())))
        report.render_scatter_svg(np.column_stack([st.d4, st.d2]), out / f"scatter_{s}.svg",
                                  f"persistent cohort: {st.label}", highlight=hl)
    _write_rows(out / "persistent_common.csv", ["vertex_key"], ([keys[k]] for k in common.tolist()))
    table = report.cohort_table(nets)
    report.write_cohort_table_csv(table, out / "cohort_table.csv")
    return {"persistent_common": int(common.size)}


def cmd_synth(cfg: RunConfig) -> dict:
    if cfg.corpus_dir is None:
        raise ConfigError("synth needs --corpus-dir to write into")
    param = cfg.team_mean
    lg = ingest.generate_synthetic(cfg.n, cfg.span_years, cfg.attach_exponent,
                                   (cfg.team_dist, param), cfg.seed,
                                   refs_per_article=cfg.refs, new_author_prob=cfg.new_author_prob,
                                   start_year=cfg.start_year, team_size_cap=cfg.team_cap)
    ingest.write_corpus(lg, cfg.corpus_dir)
    return lg.summary()


COMMANDS = {
    "ingest": cmd_ingest,
    "extract": cmd_extract,
    "transform": cmd_transform,
    "compare": cmd_compare,
    "report": cmd_report,
    "synth": cmd_synth,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail(ConfigError(message), 2)
        self.exit(2)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--corpus-dir", dest="corpus_dir")
    common.add_argument("--cache")
    common.add_argument("--epochs", help="comma-separated label=YYYY[-MM]:YYYY[-MM]")
    common.add_argument("--out")
    common.add_argument("--threads", type=int)
    common.add_argument("--holder-p", dest="holder_p", type=float)
    common.add_argument("--no-sigma0", dest="include_sigma0", action="store_const", const=False)
    common.add_argument("--seed", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="glepoch", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("ingest", "extract", "transform", "compare", "report"):
        sub.add_parser(name, parents=[common])
    s = sub.add_parser("synth", parents=[common])
    s.add_argument("--n", type=int)
    s.add_argument("--span-years", dest="span_years", type=int)
    s.add_argument("--start-year", dest="start_year", type=int)
    s.add_argument("--attach-exponent", dest="attach_exponent", type=float)
    s.add_argument("--team-dist", dest="team_dist", choices=ingest.TEAM_SIZE_KINDS)
    s.add_argument("--team-mean", dest="team_mean", type=float,
                   help="mean team size, or the exponent for zipf")
    s.add_argument("--team-cap", dest="team_cap", type=int)
    s.add_argument("--refs", type=float)
    s.add_argument("--new-author-prob", dest="new_author_prob", type=float)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        result = COMMANDS[args.command](cfg)
    except (DependencyError, ingest.CacheError, OSError) as exc:
        _fail(exc, 1)
        return 1
    except ValueError as exc:
        _fail(exc, 2)
        return 2
    print(json.dumps({"command": args.command, "ok": True, **result}, sort_keys=True))
    return 0


def _fail(exc: Exception, code: int) -> None:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc),
                                 "exit_code": code}) + "\n")


if __name__ == "__main__":
    sys.exit(main())
