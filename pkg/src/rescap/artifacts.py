"""On-disk artifact formats shared by the CLI stages.

Every stage reads the artifacts of earlier stages from a run directory
and writes its own, plus a manifest recording parameters and content
hashes of everything read and written. Nothing here embeds timestamps,
so reruns with identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from typing import Optional, Sequence

import numpy as np

from rescap.capability import CapabilityTensor, NrcaTensor
from rescap.collaboration import CollaborationTensor
from rescap.corpus import CountryCredit, TokenizedCorpus, Vocabulary
from rescap.errors import MissingArtifactError
from rescap.gravity import GravityObservation, RegressionResult
from rescap.taxonomy import ClusterAssignment

CORPUS_JSONL = "corpus.jsonl"
GROUND_TRUTH_JSON = "ground_truth.json"
CAPITALS_CSV = "capitals.csv"
RECORDS_JSONL = "records.jsonl"
REJECTS_JSONL = "rejects.jsonl"
VOCABULARY_JSON = "vocabulary.json"
CORPUS_NPZ = "corpus.npz"
K_SELECTION_JSON = "k_selection.json"
MODEL_NPZ = "model.npz"
TAXONOMY_JSON = "taxonomy.json"
DENDROGRAM_NWK = "dendrogram.nwk"
CAPABILITY_NPZ = "capability.npz"
CAPABILITY_CSV = "capability.csv"
NRCA_NPZ = "nrca.npz"
NRCA_CSV = "nrca.csv"
NRCA_BINARY_CSV = "nrca_binary.csv"
COLLAB_NPZ = "collab.npz"
COLLAB_CSV = "collab.csv"
GRAVITY_OBS_CSV = "gravity_observations.csv"
GRAVITY_RESULTS_CSV = "gravity_results.csv"
GRAVITY_TABLE_TXT = "gravity_table.txt"
TABLE1_CSV = "table1.csv"
TABLE2_CSV = "table2.csv"
FIG3_CSV = "fig3.csv"


def require(path: str) -> str:
    if not os.path.exists(path):
        raise MissingArtifactError(path)
    return path


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_dir: str, command: str, parameters: dict,
                   inputs: Sequence[str], outputs: Sequence[str]) -> str:
    payload = {
        "command": command,
        "parameters": parameters,
        "inputs": {os.path.basename(p): sha256_file(p) for p in inputs},
        "outputs": {os.path.basename(p): sha256_file(p) for p in outputs},
    }
    path = os.path.join(out_dir, f"manifest_{command}.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def save_tokenized_corpus(corpus: TokenizedCorpus, path: str) -> None:
    offsets = np.zeros(corpus.n_docs + 1, dtype=np.int64)
    for i, toks in enumerate(corpus.tokens):
        offsets[i + 1] = offsets[i] + len(toks)
    flat = (
        np.concatenate(corpus.tokens).astype(np.int32)
        if corpus.n_docs
        else np.zeros(0, dtype=np.int32)
    )
    credit_json = np.array(
        [json.dumps(c.credits, sort_keys=True) for c in corpus.credits], dtype=np.str_
    )
    np.savez_compressed(
        path,
        version=np.int64(1),
        doc_ids=np.array(corpus.doc_ids, dtype=np.str_),
        tokens_flat=flat,
        offsets=offsets,
        years=corpus.years.astype(np.int64),
        credit_json=credit_json,
    )


def load_tokenized_corpus(path: str, vocabulary: Vocabulary) -> TokenizedCorpus:
    with np.load(require(path), allow_pickle=False) as data:
        doc_ids = [str(x) for x in data["doc_ids"]]
        flat = data["tokens_flat"]
        offsets = data["offsets"]
        years = data["years"]
        credit_json = data["credit_json"]
    tokens = [flat[offsets[i]:offsets[i + 1]].copy() for i in range(len(doc_ids))]
    credits = [
        CountryCredit(paper_id=doc_id, credits=json.loads(str(raw)))
        for doc_id, raw in zip(doc_ids, credit_json)
    ]
    return TokenizedCorpus(
        doc_ids=doc_ids,
        tokens=tokens,
        years=years,
        credits=credits,
        vocabulary=vocabulary,
    )


def save_vocabulary(vocabulary: Vocabulary, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(vocabulary.to_dict(), fh, sort_keys=True)
        fh.write("\n")


def load_vocabulary(path: str) -> Vocabulary:
    with open(require(path), encoding="utf-8") as fh:
        return Vocabulary.from_dict(json.load(fh))


def save_taxonomy(assignment: ClusterAssignment, path: str, variant: str = "ward.D") -> None:
    payload = {
        "variant": variant,
        "n_clusters": assignment.n_clusters,
        "assignment": {str(t): int(c) for t, c in sorted(assignment.assignment.items())},
        "labels": {str(c): name for c, name in sorted(assignment.labels.items())},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_taxonomy(path: str) -> ClusterAssignment:
    with open(require(path), encoding="utf-8") as fh:
        payload = json.load(fh)
    return ClusterAssignment(
        assignment={int(t): int(c) for t, c in payload["assignment"].items()},
        n_clusters=int(payload["n_clusters"]),
        labels={int(c): str(name) for c, name in payload.get("labels", {}).items()},
    )


def save_capability(tensor: CapabilityTensor, path: str) -> None:
    np.savez_compressed(
        path,
        years=tensor.years,
        countries=np.array(tensor.countries, dtype=np.str_),
        values=tensor.values,
    )


def load_capability(path: str) -> CapabilityTensor:
    with np.load(require(path), allow_pickle=False) as data:
        return CapabilityTensor(
            years=data["years"].copy(),
            countries=[str(c) for c in data["countries"]],
            values=data["values"].copy(),
        )


def save_nrca(tensor: NrcaTensor, path: str) -> None:
    np.savez_compressed(
        path,
        years=tensor.years,
        countries=np.array(tensor.countries, dtype=np.str_),
        values=tensor.values,
        binary=tensor.binary.astype(np.uint8),
    )


def load_nrca(path: str) -> NrcaTensor:
    with np.load(require(path), allow_pickle=False) as data:
        return NrcaTensor(
            years=data["years"].copy(),
            countries=[str(c) for c in data["countries"]],
            values=data["values"].copy(),
            binary=data["binary"].astype(bool),
        )


def save_collab(tensor: CollaborationTensor, path: str) -> None:
    np.savez_compressed(
        path,
        years=tensor.years,
        countries=np.array(tensor.countries, dtype=np.str_),
        values=tensor.values,
    )


def load_collab(path: str) -> CollaborationTensor:
    with np.load(require(path), allow_pickle=False) as data:
        return CollaborationTensor(
            years=data["years"].copy(),
            countries=[str(c) for c in data["countries"]],
            values=data["values"].copy(),
        )


def _write_csv(path: str, header: Sequence[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(x) -> str:
    return repr(float(x))


def write_capability_csv(tensor: CapabilityTensor, path: str) -> None:
    rows = []
    for t, year in enumerate(tensor.years):
        for c, country in enumerate(tensor.countries):
            for j in range(tensor.n_clusters):
                rows.append([int(year), country, j, _fmt(tensor.values[t, c, j])])
    _write_csv(path, ["year", "country", "cluster", "value"], rows)


def write_nrca_csv(tensor: NrcaTensor, path: str, binary: bool = False) -> None:
    rows = []
    for t, year in enumerate(tensor.years):
        for c, country in enumerate(tensor.countries):
            for j in range(tensor.n_clusters):
                value = int(tensor.binary[t, c, j]) if binary else _fmt(tensor.values[t, c, j])
                rows.append([int(year), country, j, value])
    name = "advantage" if binary else "nrca"
    _write_csv(path, ["year", "country", "cluster", name], rows)


def write_collab_csv(tensor: CollaborationTensor, path: str) -> None:
    rows = [
        [year, cluster, m, n, _fmt(weight)]
        for year, cluster, m, n, weight in tensor.iter_pairs()
    ]
    _write_csv(path, ["year", "cluster", "country_m", "country_n", "weight"], rows)


def write_observations_csv(
    observations: Sequence[tuple[int, GravityObservation]], path: str
) -> None:
    """Write (cluster, observation) rows for one or several clusters."""
    rows = [
        [
            cluster,
            obs.year,
            obs.country_m,
            obs.country_n,
            _fmt(obs.weight),
            _fmt(obs.pubs_m),
            _fmt(obs.pubs_n),
            _fmt(obs.distance_km),
            _fmt(obs.capability_dist),
        ]
        for cluster, obs in observations
    ]
    _write_csv(
        path,
        ["cluster", "year", "country_m", "country_n", "weight", "pubs_m", "pubs_n",
         "distance_km", "capability_dist"],
        rows,
    )


def read_observations_csv(path: str) -> list[tuple[int, GravityObservation]]:
    observations = []
    with open(require(path), encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            observations.append(
                (
                    int(row["cluster"]),
                    GravityObservation(
                        year=int(row["year"]),
                        country_m=row["country_m"],
                        country_n=row["country_n"],
                        weight=float(row["weight"]),
                        pubs_m=float(row["pubs_m"]),
                        pubs_n=float(row["pubs_n"]),
                        distance_km=float(row["distance_km"]),
                        capability_dist=float(row["capability_dist"]),
                    ),
                )
            )
    return observations


def write_results_csv(results: dict[str, RegressionResult], path: str) -> None:
    rows = []
    for label, result in results.items():
        for entry in result.summary_rows():
            rows.append(
                [
                    label,
                    entry["term"],
                    _fmt(entry["estimate"]),
                    _fmt(entry["std_error"]),
                    _fmt(entry["t_value"]),
                    _fmt(entry["p_value"]),
                    entry["stars"],
                    result.n_obs,
                    _fmt(result.r_squared),
                ]
            )
    _write_csv(
        path,
        ["cluster", "term", "estimate", "std_error", "t_value", "p_value",
         "stars", "n_obs", "r_squared"],
        rows,
    )


def write_rejects_jsonl(rejects: Sequence[dict], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rejects:
            fh.write(json.dumps(row, sort_keys=True))
            fh.write("\n")


def write_records_jsonl(records, path: str) -> None:
    from rescap.synth import write_corpus_jsonl

    write_corpus_jsonl(records, path)
