"""Command line pipeline: synth -> ingest -> select-k -> fit -> cluster-topics
-> capability / nrca / collab -> gravity -> report.

Every stage works inside one run directory, reading the artifacts of
earlier stages and writing its own plus a manifest with content hashes.
Parameters resolve flag-first: an explicit flag wins over the YAML
config, which wins over the built-in default. Exit codes: 1 for
configuration problems, 2 for missing upstream artifacts, 3 for
numerical failures.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import os
import sys

import click
import numpy as np
import yaml

from rescap import artifacts as art
from rescap.capability import (
    build_capability,
    country_filter,
    loess_smooth,
    nrca as compute_nrca,
    rank_series,
)
from rescap.collaboration import build_collab_tensor
from rescap.corpus import build_vocabulary, collaboration_ratio, ingest, read_jsonl, tokenize
from rescap.countries import load_capitals
from rescap.errors import ConfigError, MissingArtifactError, NumericalError, RescapError
from rescap.gravity import build_observations, fit_ols_fixed_effects, format_gravity_table
from rescap.synth import (
    SynthSpec,
    generate_corpus,
    ring_coordinates,
    usage_profile_spec,
    write_capitals_csv,
    write_corpus_jsonl,
    write_ground_truth,
)
from rescap.taxonomy import cut_tree, topic_distance_matrix, ward_cluster
from rescap.topics import DynamicTopicModel, TopicCountSelector
from rescap.topics.state import TopicModelState

logger = logging.getLogger(__name__)


class RunConfig:
    """Flag > per-command config section > global config key > default."""

    def __init__(self, path=None):
        self.data = {}
        if path is not None:
            try:
                with open(path, encoding="utf-8") as fh:
                    loaded = yaml.safe_load(fh)
            except FileNotFoundError:
                raise ConfigError(f"config file not found: {path}") from None
            except yaml.YAMLError as exc:
                raise ConfigError(f"config file is not valid YAML: {exc}") from exc
            if loaded is None:
                loaded = {}
            if not isinstance(loaded, dict):
                raise ConfigError("config file must hold a mapping at top level")
            self.data = loaded

    def section(self, command: str) -> dict:
        section = self.data.get(command, {})
        if section is None:
            return {}
        if not isinstance(section, dict):
            raise ConfigError(f"config section {command!r} must be a mapping")
        return section

    def get(self, command: str, key: str, flag=None, default=None):
        if flag is not None:
            return flag
        section = self.section(command)
        if key in section:
            return section[key]
        value = self.data.get(key)
        if value is not None and not isinstance(value, dict):
            return value
        return default


def _setup_logging(verbose: int) -> None:
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


@click.group(name="rescap")
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="YAML config file; flags override its values.")
@click.option("--out-dir", default="run", show_default=True,
              help="Run directory for artifacts and manifests.")
@click.option("--seed", type=int, default=None, help="Global random seed.")
@click.option("--threads", type=int, default=None, help="Compute thread cap.")
@click.option("-v", "--verbose", count=True, help="More logging (-v info, -vv debug).")
@click.pass_context
def cli(ctx, config_path, out_dir, seed, threads, verbose):
    """Measure national research capability from bibliographic records."""
    _setup_logging(verbose)
    if threads is not None:
        if threads < 1:
            raise ConfigError(f"threads must be >= 1, got {threads}")
        try:
            import numba

            numba.set_num_threads(threads)
        except (ImportError, ValueError) as exc:
            logger.warning("could not set thread count: %s", exc)
    ctx.obj = {
        "config": RunConfig(config_path),
        "config_path": config_path,
        "out_dir": out_dir,
        "seed": seed,
    }
    os.makedirs(out_dir, exist_ok=True)


def _resolve_seed(ctx_obj, command: str, default: int = 0) -> int:
    return int(ctx_obj["config"].get(command, "seed", ctx_obj["seed"], default))


def _path(ctx_obj, name: str) -> str:
    return os.path.join(ctx_obj["out_dir"], name)


_SYNTH_FIELDS = {f.name for f in dataclasses.fields(SynthSpec)}


def _synth_spec(config: RunConfig, seed: int) -> SynthSpec:
    section = dict(config.section("synth"))
    unknown = set(section) - _SYNTH_FIELDS
    if unknown:
        raise ConfigError(f"unknown synth config keys: {', '.join(sorted(unknown))}")
    if "countries" in section:
        section["countries"] = tuple(str(c) for c in section["countries"])
    if "years" in section:
        years = section["years"]
        if not (isinstance(years, (list, tuple)) and len(years) == 2):
            raise ConfigError("synth.years must be a [first, last] pair")
        section["years"] = (int(years[0]), int(years[1]))
    if "cluster_multipliers" in section:
        section["cluster_multipliers"] = {
            str(country): {int(j): float(m) for j, m in mults.items()}
            for country, mults in section["cluster_multipliers"].items()
        }
    section.pop("seed", None)
    return SynthSpec(seed=seed, **section)


@cli.command()
@click.option("--preset", type=click.Choice(["planted", "usage"]), default="planted",
              show_default=True,
              help="planted: config-driven planted-topic corpus; "
                   "usage: heavy/light topic-usage corpus.")
@click.pass_obj
def synth(obj, preset):
    """Generate a synthetic corpus with ground truth and capitals."""
    seed = _resolve_seed(obj, "synth")
    if preset == "usage":
        spec = usage_profile_spec(seed)
    else:
        spec = _synth_spec(obj["config"], seed)
    records, truth = generate_corpus(spec)
    corpus_path = _path(obj, art.CORPUS_JSONL)
    truth_path = _path(obj, art.GROUND_TRUTH_JSON)
    capitals_path = _path(obj, art.CAPITALS_CSV)
    write_corpus_jsonl(records, corpus_path)
    write_ground_truth(truth, truth_path)
    write_capitals_csv(ring_coordinates(spec.countries), capitals_path)
    art.write_manifest(
        obj["out_dir"], "synth",
        {"seed": seed, "preset": preset, "n_docs": len(records),
         "n_topics": spec.n_topics, "vocab_size": spec.vocab_size},
        [], [corpus_path, truth_path, capitals_path],
    )
    click.echo(f"synth: wrote {len(records)} records to {corpus_path}")


@cli.command(name="ingest")
@click.option("--input", "input_path", type=click.Path(), default=None,
              help="Raw JSONL records [default: <out-dir>/corpus.jsonl].")
@click.option("--window", nargs=2, type=int, default=None,
              help="Study window as first and last admissible year.")
@click.option("--tfidf-min", type=float, default=None)
@click.option("--min-count", type=int, default=None)
@click.pass_obj
def ingest_cmd(obj, input_path, window, tfidf_min, min_count):
    """Validate records, build the vocabulary, tokenize the corpus."""
    config = obj["config"]
    input_path = config.get("ingest", "input", input_path, _path(obj, art.CORPUS_JSONL))
    window = tuple(config.get("ingest", "window", window, (1976, 2016)))
    tfidf_min = float(config.get("ingest", "tfidf_min", tfidf_min, 1e-6))
    min_count = int(config.get("ingest", "min_count", min_count, 10))
    art.require(input_path)

    result = ingest((record for _, record in read_jsonl(input_path)), window)
    vocabulary = build_vocabulary(result.records, tfidf_min=tfidf_min, min_count=min_count)
    corpus = tokenize(result.records, vocabulary)

    records_path = _path(obj, art.RECORDS_JSONL)
    rejects_path = _path(obj, art.REJECTS_JSONL)
    vocab_path = _path(obj, art.VOCABULARY_JSON)
    corpus_path = _path(obj, art.CORPUS_NPZ)
    art.write_records_jsonl(result.records, records_path)
    art.write_rejects_jsonl(result.rejects, rejects_path)
    art.save_vocabulary(vocabulary, vocab_path)
    art.save_tokenized_corpus(corpus, corpus_path)
    art.write_manifest(
        obj["out_dir"], "ingest",
        {"input": os.path.basename(input_path), "window": list(window),
         "tfidf_min": tfidf_min, "min_count": min_count,
         "admitted": len(result.records), "rejected": len(result.rejects),
         "n_terms": len(vocabulary), "n_docs": corpus.n_docs},
        [input_path], [records_path, rejects_path, vocab_path, corpus_path],
    )
    click.echo(
        f"ingest: {len(result.records)} records, {len(result.rejects)} rejects, "
        f"{len(vocabulary)} terms, {corpus.n_docs} tokenized docs"
    )


@cli.command(name="select-k")
@click.option("--k-probe", type=int, default=None)
@click.option("--w-th", type=int, default=None)
@click.option("--sweeps", type=int, default=None)
@click.option("--burn-in", type=int, default=None)
@click.pass_obj
def select_k(obj, k_probe, w_th, sweeps, burn_in):
    """Choose the number of topics from a probe model's usage profile."""
    config = obj["config"]
    k_probe = int(config.get("select-k", "k_probe", k_probe, 500))
    w_th = int(config.get("select-k", "w_th", w_th, 50))
    sweeps = int(config.get("select-k", "sweeps", sweeps, 200))
    burn_in = int(config.get("select-k", "burn_in", burn_in, 50))
    seed = _resolve_seed(obj, "select-k")

    vocab_path = _path(obj, art.VOCABULARY_JSON)
    corpus_path = _path(obj, art.CORPUS_NPZ)
    corpus = art.load_tokenized_corpus(corpus_path, art.load_vocabulary(vocab_path))
    selector = TopicCountSelector(
        k_probe=k_probe, w_th=w_th, sweeps=sweeps, burn_in=burn_in, seed=seed
    )
    selector.fit(corpus)

    out_path = _path(obj, art.K_SELECTION_JSON)
    profile = selector.profile_
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "k": selector.n_topics_,
                "k_probe": k_probe,
                "w_th": w_th,
                "cutoff": selector.cutoff_,
                "p": [None if np.isnan(v) else float(v) for v in profile.p],
                "docs_per_topic": [int(v) for v in profile.n_docs],
                "long_docs_per_topic": [int(v) for v in profile.n_long],
            },
            fh, indent=2, sort_keys=True,
        )
        fh.write("\n")
    art.write_manifest(
        obj["out_dir"], "select-k",
        {"k_probe": k_probe, "w_th": w_th, "sweeps": sweeps,
         "burn_in": burn_in, "seed": seed, "k": selector.n_topics_},
        [vocab_path, corpus_path], [out_path],
    )
    click.echo(f"select-k: chose k={selector.n_topics_} (cutoff={selector.cutoff_})")


@cli.command()
@click.option("--k", type=int, default=None,
              help="Number of topics [default: from k_selection.json].")
@click.option("--chain-strength", type=float, default=None)
@click.option("--sweeps", type=int, default=None)
@click.option("--burn-in", type=int, default=None)
@click.pass_obj
def fit(obj, k, chain_strength, sweeps, burn_in):
    """Fit the chained-prior topic model over yearly epochs."""
    config = obj["config"]
    chain_strength = float(config.get("fit", "chain_strength", chain_strength, 100.0))
    sweeps = int(config.get("fit", "sweeps", sweeps, 1000))
    burn_in = int(config.get("fit", "burn_in", burn_in, 200))
    seed = _resolve_seed(obj, "fit")
    k = config.get("fit", "k", k)
    if k is None:
        selection_path = _path(obj, art.K_SELECTION_JSON)
        art.require(selection_path)
        with open(selection_path, encoding="utf-8") as fh:
            k = json.load(fh)["k"]
    k = int(k)

    vocab_path = _path(obj, art.VOCABULARY_JSON)
    corpus_path = _path(obj, art.CORPUS_NPZ)
    corpus = art.load_tokenized_corpus(corpus_path, art.load_vocabulary(vocab_path))
    model = DynamicTopicModel(
        n_topics=k, chain_strength=chain_strength, sweeps=sweeps, burn_in=burn_in, seed=seed
    )
    model.fit(corpus)
    model_path = _path(obj, art.MODEL_NPZ)
    model.state_.save(model_path)
    art.write_manifest(
        obj["out_dir"], "fit",
        {"k": k, "chain_strength": chain_strength, "sweeps": sweeps,
         "burn_in": burn_in, "seed": seed, "n_epochs": model.state_.n_epochs},
        [vocab_path, corpus_path], [model_path],
    )
    click.echo(f"fit: k={k}, {model.state_.n_epochs} epochs -> {model_path}")


@cli.command(name="cluster-topics")
@click.option("--clusters", type=int, default=None, help="Number of clusters to cut.")
@click.option("--ward-variant", type=click.Choice(["ward.D", "ward.D2"]), default=None)
@click.option("--labels", "labels_path", type=click.Path(), default=None,
              help="YAML mapping cluster id to a human name.")
@click.pass_obj
def cluster_topics(obj, clusters, ward_variant, labels_path):
    """Cluster topics by word-distribution distance into a taxonomy."""
    config = obj["config"]
    clusters = int(config.get("cluster-topics", "clusters", clusters, 5))
    variant = str(config.get("cluster-topics", "ward_variant", ward_variant, "ward.D"))
    labels_path = config.get("cluster-topics", "labels", labels_path)

    model_path = _path(obj, art.MODEL_NPZ)
    state = TopicModelState.load(art.require(model_path))
    distances = topic_distance_matrix(state)
    dendrogram = ward_cluster(distances, variant=variant)
    assignment = cut_tree(dendrogram, clusters)
    if labels_path is not None:
        with open(art.require(labels_path), encoding="utf-8") as fh:
            raw = yaml.safe_load(fh) or {}
        if not isinstance(raw, dict):
            raise ConfigError("labels file must map cluster id to name")
        assignment.labels = {int(c): str(name) for c, name in raw.items()}

    taxonomy_path = _path(obj, art.TAXONOMY_JSON)
    dendro_path = _path(obj, art.DENDROGRAM_NWK)
    art.save_taxonomy(assignment, taxonomy_path, variant=variant)
    with open(dendro_path, "w", encoding="utf-8") as fh:
        fh.write(dendrogram.to_newick())
        fh.write("\n")
    inputs = [model_path] + ([labels_path] if labels_path else [])
    art.write_manifest(
        obj["out_dir"], "cluster-topics",
        {"clusters": clusters, "ward_variant": variant,
         "labels": os.path.basename(labels_path) if labels_path else None},
        inputs, [taxonomy_path, dendro_path],
    )
    click.echo(f"cluster-topics: {state.k} topics -> {clusters} clusters")


def _load_pipeline_inputs(obj):
    vocab_path = _path(obj, art.VOCABULARY_JSON)
    corpus_path = _path(obj, art.CORPUS_NPZ)
    model_path = _path(obj, art.MODEL_NPZ)
    taxonomy_path = _path(obj, art.TAXONOMY_JSON)
    corpus = art.load_tokenized_corpus(corpus_path, art.load_vocabulary(vocab_path))
    state = TopicModelState.load(art.require(model_path))
    cluster_map = art.load_taxonomy(taxonomy_path)
    theta_by_id = {doc_id: state.doc_theta[i] for i, doc_id in enumerate(state.doc_ids)}
    thetas = [theta_by_id.get(doc_id) for doc_id in corpus.doc_ids]
    inputs = [vocab_path, corpus_path, model_path, taxonomy_path]
    return corpus, cluster_map, thetas, inputs


@cli.command()
@click.pass_obj
def capability(obj):
    """Accumulate the year x country x cluster output tensor."""
    corpus, cluster_map, thetas, inputs = _load_pipeline_inputs(obj)
    tensor = build_capability(
        corpus.doc_ids, corpus.years, corpus.credits, thetas, cluster_map
    )
    npz_path = _path(obj, art.CAPABILITY_NPZ)
    csv_path = _path(obj, art.CAPABILITY_CSV)
    art.save_capability(tensor, npz_path)
    art.write_capability_csv(tensor, csv_path)
    art.write_manifest(
        obj["out_dir"], "capability",
        {"n_years": int(tensor.years.size), "n_countries": len(tensor.countries),
         "n_clusters": tensor.n_clusters},
        inputs, [npz_path, csv_path],
    )
    click.echo(
        f"capability: {tensor.years.size} years x {len(tensor.countries)} countries "
        f"x {tensor.n_clusters} clusters"
    )


@cli.command()
@click.pass_obj
def nrca(obj):
    """Turn the capability tensor into comparative-advantage scores."""
    npz_in = _path(obj, art.CAPABILITY_NPZ)
    tensor = art.load_capability(npz_in)
    advantage = compute_nrca(tensor)
    npz_path = _path(obj, art.NRCA_NPZ)
    csv_path = _path(obj, art.NRCA_CSV)
    binary_path = _path(obj, art.NRCA_BINARY_CSV)
    art.save_nrca(advantage, npz_path)
    art.write_nrca_csv(advantage, csv_path, binary=False)
    art.write_nrca_csv(advantage, binary_path, binary=True)
    art.write_manifest(
        obj["out_dir"], "nrca",
        {"n_years": int(advantage.years.size)},
        [npz_in], [npz_path, csv_path, binary_path],
    )
    click.echo(f"nrca: {advantage.years.size} years scored")


@cli.command()
@click.pass_obj
def collab(obj):
    """Accumulate the year x cluster collaboration tensor."""
    corpus, cluster_map, thetas, inputs = _load_pipeline_inputs(obj)
    tensor = build_collab_tensor(
        corpus.doc_ids, corpus.years, corpus.credits, thetas, cluster_map
    )
    npz_path = _path(obj, art.COLLAB_NPZ)
    csv_path = _path(obj, art.COLLAB_CSV)
    art.save_collab(tensor, npz_path)
    art.write_collab_csv(tensor, csv_path)
    art.write_manifest(
        obj["out_dir"], "collab",
        {"n_years": int(tensor.years.size), "n_countries": len(tensor.countries),
         "n_clusters": tensor.n_clusters},
        inputs, [npz_path, csv_path],
    )
    click.echo(f"collab: {tensor.years.size} years x {tensor.n_clusters} clusters")


def _cluster_label(cluster_map, j: int) -> str:
    return cluster_map.labels.get(j, f"cluster{j}")


def _resolve_capitals(obj, capitals_path):
    if capitals_path is not None:
        return art.require(capitals_path), load_capitals(art.require(capitals_path))
    sidecar = _path(obj, art.CAPITALS_CSV)
    if os.path.exists(sidecar):
        return sidecar, load_capitals(sidecar)
    return None, load_capitals()


def _fit_gravity(obj, cluster, robust, epsilon_w, leave_one_out, capitals_path):
    collab_path = _path(obj, art.COLLAB_NPZ)
    capability_path = _path(obj, art.CAPABILITY_NPZ)
    nrca_path = _path(obj, art.NRCA_NPZ)
    taxonomy_path = _path(obj, art.TAXONOMY_JSON)
    tensor = art.load_collab(collab_path)
    cap = art.load_capability(capability_path)
    advantage = art.load_nrca(nrca_path)
    cluster_map = art.load_taxonomy(taxonomy_path)
    capitals_file, capitals = _resolve_capitals(obj, capitals_path)

    cluster_ids = list(range(tensor.n_clusters)) if cluster is None else [cluster]
    all_obs = []
    results = {}
    for j in cluster_ids:
        observations = build_observations(
            tensor, cap, advantage, capitals, j,
            leave_one_out=leave_one_out, epsilon_w=epsilon_w,
        )
        if not observations:
            raise NumericalError(f"no usable gravity observations for cluster {j}")
        all_obs.extend((j, obs) for obs in observations)
        results[_cluster_label(cluster_map, j)] = fit_ols_fixed_effects(
            observations, robust=robust
        )
    inputs = [collab_path, capability_path, nrca_path, taxonomy_path]
    if capitals_file:
        inputs.append(capitals_file)
    return all_obs, results, inputs


@cli.command()
@click.option("--cluster", type=int, default=None,
              help="Fit a single cluster [default: all clusters].")
@click.option("--robust-se", is_flag=True, default=False,
              help="HC1 robust standard errors instead of classical.")
@click.option("--epsilon-w", type=float, default=None,
              help="Keep zero-weight pairs by adding this to every weight.")
@click.option("--leave-one-out", is_flag=True, default=False,
              help="Drop the modeled cluster from the capability profiles.")
@click.option("--capitals", "capitals_path", type=click.Path(), default=None,
              help="Capitals CSV [default: run sidecar, then packaged table].")
@click.pass_obj
def gravity(obj, cluster, robust_se, epsilon_w, leave_one_out, capitals_path):
    """Fit the collaboration gravity model with year fixed effects."""
    config = obj["config"]
    if cluster is None:
        cluster = config.get("gravity", "cluster", None)
        cluster = int(cluster) if cluster is not None else None
    robust_se = bool(config.get("gravity", "robust_se", robust_se or None, False))
    if epsilon_w is None:
        epsilon_w = config.get("gravity", "epsilon_w", None)
        epsilon_w = float(epsilon_w) if epsilon_w is not None else None
    all_obs, results, inputs = _fit_gravity(
        obj, cluster, robust_se, epsilon_w, leave_one_out, capitals_path
    )

    obs_path = _path(obj, art.GRAVITY_OBS_CSV)
    results_path = _path(obj, art.GRAVITY_RESULTS_CSV)
    table_path = _path(obj, art.GRAVITY_TABLE_TXT)
    art.write_observations_csv(all_obs, obs_path)
    art.write_results_csv(results, results_path)
    with open(table_path, "w", encoding="utf-8") as fh:
        fh.write(format_gravity_table(results))
        fh.write("\n")
    art.write_manifest(
        obj["out_dir"], "gravity",
        {"cluster": cluster, "robust_se": robust_se, "epsilon_w": epsilon_w,
         "leave_one_out": leave_one_out, "n_obs": len(all_obs)},
        inputs, [obs_path, results_path, table_path],
    )
    for label, result in results.items():
        click.echo(f"gravity[{label}]: N={result.n_obs} R^2={result.r_squared:.3f}")


@cli.command()
@click.option("--min-papers", type=float, default=None,
              help="Fractional-paper floor for the reported country set.")
@click.option("--span", type=float, default=None, help="LOESS span for rank smoothing.")
@click.pass_obj
def report(obj, min_papers, span):
    """Produce the summary, regression, and rank-trajectory tables."""
    config = obj["config"]
    min_papers = float(config.get("report", "min_papers", min_papers, 250.0))
    span = float(config.get("report", "span", span, 0.75))

    records_path = _path(obj, art.RECORDS_JSONL)
    nrca_path = _path(obj, art.NRCA_NPZ)
    results_path = _path(obj, art.GRAVITY_RESULTS_CSV)
    art.require(records_path)
    art.require(results_path)
    result = ingest((r for _, r in read_jsonl(records_path)))
    advantage = art.load_nrca(art.require(nrca_path))

    countries = country_filter(result.records, min_papers)
    if not countries:
        raise ConfigError(
            f"no country exceeds min_papers={min_papers}; lower the threshold"
        )
    summaries = {row.country: row for row in collaboration_ratio(result.records)}

    table1_path = _path(obj, art.TABLE1_CSV)
    with open(table1_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["country", "collaborative", "total", "ratio"])
        for country in countries:
            row = summaries[country]
            writer.writerow(
                [country, repr(row.collaborative), repr(row.total), repr(row.ratio)]
            )

    table2_path = _path(obj, art.TABLE2_CSV)
    _write_table2(results_path, table2_path)

    fig3_path = _path(obj, art.FIG3_CSV)
    rows = []
    for j in range(advantage.n_clusters):
        series = rank_series(advantage, j, countries)
        years = series.years.astype(float)
        for country in countries:
            ranks = series.series(country).astype(float)
            smoothed = loess_smooth(years, ranks, span=span)
            for year, rank, smooth in zip(series.years, ranks, smoothed):
                rows.append([int(year), country, j, int(rank), repr(float(smooth))])
    rows.sort(key=lambda r: (r[2], r[1], r[0]))
    with open(fig3_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["year", "country", "cluster", "rank", "smoothed_rank"])
        writer.writerows(rows)

    art.write_manifest(
        obj["out_dir"], "report",
        {"min_papers": min_papers, "span": span, "countries": countries},
        [records_path, nrca_path, results_path],
        [table1_path, table2_path, fig3_path],
    )
    click.echo(f"report: {len(countries)} countries -> table1, table2, fig3")


_TABLE2_TERMS = (
    ("ln_pubs_sym", "ln_pubs_m"),
    ("ln_pubs_sym", "ln_pubs_n"),
    ("ln_distance", "ln_distance"),
    ("capability_dist", "capability_dist"),
    ("const", "const"),
)


def _write_table2(results_csv: str, out_path: str) -> None:
    """Reshape the long results CSV into a term x cluster table."""
    by_cluster: dict[str, dict] = {}
    with open(results_csv, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            entry = by_cluster.setdefault(
                row["cluster"], {"terms": {}, "n_obs": row["n_obs"],
                                 "r_squared": row["r_squared"]}
            )
            entry["terms"][row["term"]] = row
    labels = list(by_cluster)
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["term"] + labels)
        for term, shown in _TABLE2_TERMS:
            cells = []
            for label in labels:
                row = by_cluster[label]["terms"][term]
                est = float(row["estimate"])
                se = float(row["std_error"])
                cells.append(f"{est:.3f} ({se:.3f}){row['stars']}")
            writer.writerow([shown] + cells)
        writer.writerow(["n_obs"] + [by_cluster[label]["n_obs"] for label in labels])
        writer.writerow(
            ["r_squared"]
            + [f"{float(by_cluster[label]['r_squared']):.3f}" for label in labels]
        )


def main(argv=None) -> int:
    """Entry point mapping error classes to stable exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 130
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except MissingArtifactError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except NumericalError as exc:
        click.echo(f"error: {exc}", err=True)
        return 3
    except RescapError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
