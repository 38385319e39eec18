"""Command-line pipeline: crawl, normalize, train, predict, evaluate.

Exit codes: 0 success, 2 input/config error, 3 data-insufficiency error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import classifier, corpusio, encoder, labels, metrics, textprep
from .config import (
    BACKENDS,
    TASKS,
    ConfigError,
    PipelineConfig,
    load_config,
)
from .ingest import crawl as crawl_mod
from .ingest.extract import ProfileError, dedupe, load_site_profiles
from .ingest.fetch import PoliteFetcher

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DATA = 3


class CliInputError(Exception):
    """Exit-2 class errors: bad config, missing files, mismatched inputs."""


class CliDataError(Exception):
    """Exit-3 class errors: inputs parse but cannot support the operation."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="factpipe",
        description="Fact-check corpus pipeline: crawl, harmonize labels,"
        " train and evaluate a veracity/domain classifier.",
    )
    parser.add_argument("--config", metavar="PATH", help="JSON pipeline config")
    parser.add_argument("--seed", type=int, metavar="N", help="override the pipeline seed")
    parser.add_argument("--task", choices=TASKS, help="classification task")
    parser.add_argument("--backend", choices=BACKENDS, help="feature backend")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("crawl", help="fetch articles from configured sites")
    p.add_argument("--sites", nargs="*", metavar="SITE_ID",
                   help="crawl only these site ids")
    p.add_argument("--budget", type=int, default=100,
                   help="max pages per site (default 100)")
    p.add_argument("--out", metavar="PATH", help="corpus file (appended)")

    p = sub.add_parser("normalize", help="map raw verdicts/topics onto the taxonomies")
    p.add_argument("--table", metavar="PATH", help="mapping table file")
    p.add_argument("--corpus", metavar="PATH", help="corpus file (rewritten)")

    p = sub.add_parser("train", help="train the classifier on a labeled corpus")
    p.add_argument("--corpus", metavar="PATH")
    p.add_argument("--model", metavar="PATH")
    p.add_argument("--history", metavar="PATH", help="per-epoch loss file")

    p = sub.add_parser("predict", help="classify corpus lines or raw text")
    p.add_argument("--model", metavar="PATH")
    p.add_argument("--input", metavar="PATH", default="-",
                   help="corpus file, or - for stdin (default)")
    p.add_argument("--output", metavar="PATH", default="-",
                   help="predictions file, or - for stdout (default)")
    p.add_argument("--raw", action="store_true",
                   help="treat each input line as bare document text")

    p = sub.add_parser("evaluate", help="score predictions against a gold corpus")
    p.add_argument("--gold", metavar="PATH", help="labeled corpus file")
    p.add_argument("--predictions", metavar="PATH", required=True)
    p.add_argument("--report", metavar="PATH",
                   help="metrics JSON (default: <predictions>.metrics.json)")

    return parser


def _resolve_config(args: argparse.Namespace) -> PipelineConfig:
    config = load_config(args.config) if args.config else PipelineConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.task is not None:
        overrides["task"] = args.task
    if args.backend is not None:
        overrides["backend"] = args.backend
    return dataclasses.replace(config, **overrides) if overrides else config


def _require_file(path: str | Path, what: str) -> Path:
    path = Path(path)
    if not path.is_file():
        raise CliInputError(f"{what} not found: {path}")
    return path


def _load_table(config: PipelineConfig, override: str | None) -> labels.MappingTable:
    path = override or config.mapping_table_path
    if path is None:
        return labels.load_default_table()
    return labels.load_mapping_table(_require_file(path, "mapping table"))


# --- crawl -------------------------------------------------------------------

def cmd_crawl(config: PipelineConfig, args: argparse.Namespace) -> int:
    sites_dir = Path(config.sites_dir)
    profiles = load_site_profiles(sites_dir) if sites_dir.is_dir() else []
    if not profiles:
        raise CliInputError(f"no site profiles found in {sites_dir}")
    if args.sites:
        by_id = {profile.site_id: profile for profile in profiles}
        unknown = [site for site in args.sites if site not in by_id]
        if unknown:
            raise CliInputError(f"unknown site ids {unknown}")
        profiles = [by_id[site] for site in args.sites]

    fetcher = PoliteFetcher(
        user_agent=config.user_agent, timeout_s=config.request_timeout_s
    )
    budget = args.budget

    def run(profile):
        return crawl_mod.crawl_site(profile, budget, fetcher)

    if len(profiles) == 1:
        outcomes = [run(profiles[0])]
    else:
        with ThreadPoolExecutor(max_workers=min(8, len(profiles))) as pool:
            outcomes = list(pool.map(run, profiles))

    records = []
    for (site_records, report), profile in zip(outcomes, profiles):
        records.extend(site_records)
        print(
            f"{profile.site_id}: fetched={report.fetched}"
            f" extracted={report.extracted} failed={report.failed}"
            f" skipped={report.skipped}"
        )
        for seed_url in report.unreachable_seeds:
            print(f"{profile.site_id}: unreachable seed {seed_url}")

    out_path = args.out or config.corpus_path
    added = corpusio.append_records(out_path, dedupe(records))
    print(f"corpus: +{added} records -> {out_path}")
    return EXIT_OK


# --- normalize ---------------------------------------------------------------

def cmd_normalize(config: PipelineConfig, args: argparse.Namespace) -> int:
    corpus_path = _require_file(args.corpus or config.corpus_path, "corpus")
    table = _load_table(config, args.table)
    rows = corpusio.read_corpus(corpus_path)

    verdict_report = labels.UnmappedReport()
    domain_report = labels.UnmappedReport()
    for row in rows:
        if row.raw_verdict is None:
            row.verdict_class = None
            verdict_report.add(labels.MISSING_LABEL)
        else:
            outcome = labels.normalize_verdict(row.raw_verdict, table)
            if isinstance(outcome, labels.Unmapped):
                row.verdict_class = None
                verdict_report.add(outcome.canonical)
            else:
                row.verdict_class = outcome.value
        if row.raw_topic is None:
            row.domain_class = None
            domain_report.add(labels.MISSING_LABEL)
        else:
            outcome = labels.normalize_domain(row.raw_topic, table)
            if isinstance(outcome, labels.Unmapped):
                row.domain_class = None
                domain_report.add(outcome.canonical)
            else:
                row.domain_class = outcome.value

    corpusio.write_corpus(corpus_path, rows)
    report_path = Path(str(corpus_path) + ".unmapped.json")
    corpusio.write_atomic(
        report_path,
        json.dumps(
            {"verdicts": verdict_report.as_dict(), "domains": domain_report.as_dict()},
            ensure_ascii=False,
            indent=2,
        )
        + "\n",
    )

    labeled = sum(1 for row in rows if row.verdict_class is not None)
    print(f"normalized {corpus_path}: {labeled}/{len(rows)} verdict-labeled")
    print("unmapped verdicts:")
    print(verdict_report.format_table())
    print("unmapped topics:")
    print(domain_report.format_table())
    return EXIT_OK


# --- train -------------------------------------------------------------------

def _labeled_rows(rows, label_field: str, class_names: tuple[str, ...]):
    index = {name: i for i, name in enumerate(class_names)}
    pairs = []
    for row in rows:
        value = getattr(row, label_field)
        if value is None:
            continue
        if value not in index:
            raise CliInputError(
                f"record {row.record_id}: illegal {label_field} {value!r}"
            )
        pairs.append((row, index[value]))
    return pairs


def _vocab_signature(vocab: textprep.Vocabulary) -> str:
    digest = hashlib.sha256()
    digest.update(f"{vocab.corpus_size}:{vocab.min_df}:{vocab.max_terms}".encode())
    for term in vocab.terms:
        digest.update(term.encode("utf-8"))
        digest.update(b"\x00")
        digest.update(str(vocab.doc_freq[term]).encode())
    return digest.hexdigest()[:16]


def cmd_train(config: PipelineConfig, args: argparse.Namespace) -> int:
    corpus_path = _require_file(args.corpus or config.corpus_path, "corpus")
    model_path = Path(args.model or config.model_path)
    history_path = Path(args.history or f"{model_path}.history.json")

    rows = corpusio.read_corpus(corpus_path)
    class_names = config.class_names()
    pairs = _labeled_rows(rows, config.label_field(), class_names)
    if not pairs:
        raise CliDataError(f"no rows labeled with {config.label_field()}")
    present = {label for _, label in pairs}
    if len(present) < 2:
        only = class_names[next(iter(present))]
        raise CliDataError(
            f"need at least 2 classes to train, corpus has only {only!r}"
        )

    texts = [textprep.clean_text(row.title, row.body_text) for row, _ in pairs]
    y = [label for _, label in pairs]

    if config.backend == "tfidf":
        docs = [textprep.tokenize(text) for text in texts]
        vocab = textprep.build_vocabulary(docs, config.min_df, config.max_terms)
        if len(vocab) == 0:
            raise CliDataError("vocabulary is empty; corpus too small for min_df")
        features = [textprep.vectorize_tfidf(doc, vocab) for doc in docs]
        feature_space = f"tfidf:{_vocab_signature(vocab)}"
        textprep.save_vocabulary(vocab, f"{model_path}.vocab")
    else:
        backend = encoder.EncoderBackendRef(
            endpoint=config.effective_encoder_endpoint(),
            dims=config.encoder_dims,
            timeout_ms=config.encoder_timeout_ms,
            batch_limit=config.encoder_batch_limit,
        )
        features = encoder.embed_remote(texts, backend)
        feature_space = f"encoder:dims={config.encoder_dims}"

    params, history = classifier.train(
        features, y, class_names, config.effective_train_config(), feature_space
    )
    classifier.save_model(params, model_path)
    history_payload = {
        "epochs": [
            {"epoch": i + 1, "train_loss": tl, "val_loss": vl}
            for i, (tl, vl) in enumerate(zip(history.train_loss, history.val_loss))
        ],
        "best_epoch": history.best_epoch + 1,
        "stopped_early": history.stopped_early,
    }
    corpusio.write_atomic(
        history_path, json.dumps(history_payload, indent=2) + "\n"
    )
    print(
        f"trained {config.task} on {len(pairs)} examples"
        f" ({len(history.train_loss)} epochs, best {history.best_epoch + 1})"
        f" -> {model_path}"
    )
    return EXIT_OK


# --- predict -----------------------------------------------------------------

def _load_model_for_task(config: PipelineConfig, model_path: Path) -> classifier.ModelParams:
    params = classifier.load_model(_require_file(model_path, "model"))
    if params.class_names != config.class_names():
        raise CliInputError(
            f"model classes {list(params.class_names)} do not match task"
            f" {config.task} {list(config.class_names())}"
        )
    return params


def cmd_predict(config: PipelineConfig, args: argparse.Namespace) -> int:
    model_path = Path(args.model or config.model_path)
    params = _load_model_for_task(config, model_path)

    if args.input == "-":
        lines = [line.rstrip("\n") for line in sys.stdin]
    else:
        input_path = _require_file(args.input, "input")
        lines = input_path.read_text(encoding="utf-8").splitlines()
    lines = [line for line in lines if line.strip()]

    if args.raw:
        ids = [f"line-{i + 1:06d}" for i in range(len(lines))]
        texts = [textprep.clean_text("", line) for line in lines]
    else:
        rows = [corpusio.loads_row(line) for line in lines]
        ids = [row.record_id for row in rows]
        texts = [textprep.clean_text(row.title, row.body_text) for row in rows]

    out_lines = []
    if texts:
        if params.feature_space.startswith("tfidf:"):
            vocab_path = _require_file(f"{model_path}.vocab", "vocabulary")
            vocab = textprep.load_vocabulary(vocab_path)
            if f"tfidf:{_vocab_signature(vocab)}" != params.feature_space:
                raise CliInputError(
                    f"vocabulary {vocab_path} does not match the model's"
                    " feature space tag"
                )
            features = [
                textprep.vectorize_tfidf(textprep.tokenize(text), vocab)
                for text in texts
            ]
        else:
            backend = encoder.EncoderBackendRef(
                endpoint=config.effective_encoder_endpoint(),
                dims=params.n_features,
                timeout_ms=config.encoder_timeout_ms,
                batch_limit=config.encoder_batch_limit,
            )
            features = encoder.embed_remote(texts, backend)

        class_ids, probs = classifier.predict_many(params, features)
        for rid, cid, p in zip(ids, class_ids, probs):
            out_lines.append(
                json.dumps(
                    {
                        "record_id": rid,
                        "class": params.class_names[int(cid)],
                        "probs": [float(v) for v in p],
                    },
                    ensure_ascii=False,
                    separators=(",", ":"),
                )
            )

    payload = "".join(line + "\n" for line in out_lines)
    if args.output == "-":
        sys.stdout.write(payload)
    else:
        corpusio.write_atomic(args.output, payload)
    return EXIT_OK


# --- evaluate ----------------------------------------------------------------

def cmd_evaluate(config: PipelineConfig, args: argparse.Namespace) -> int:
    gold_path = _require_file(args.gold or config.corpus_path, "gold corpus")
    pred_path = _require_file(args.predictions, "predictions")

    class_names = config.class_names()
    index = {name: i for i, name in enumerate(class_names)}
    label_field = config.label_field()

    golds: dict[str, int] = {}
    for row in corpusio.read_corpus(gold_path):
        value = getattr(row, label_field)
        if value is None:
            continue
        if value not in index:
            raise CliInputError(f"gold record {row.record_id}: illegal {value!r}")
        golds[row.record_id] = index[value]

    preds: dict[str, int] = {}
    for line in pred_path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        try:
            payload = json.loads(line)
            rid, name = payload["record_id"], payload["class"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CliInputError(f"bad prediction line {line[:80]!r}: {exc}") from exc
        if name not in index:
            raise CliInputError(f"prediction {rid}: unknown class {name!r}")
        preds[rid] = index[name]

    unmatched = sorted(set(golds) ^ set(preds))
    if unmatched:
        shown = ", ".join(unmatched[:10])
        raise CliInputError(
            f"{len(unmatched)} record_ids do not join between gold and"
            f" predictions; first: {shown}"
        )
    if not golds:
        raise CliDataError("nothing to evaluate: no labeled gold records")

    ids = sorted(golds)
    cm = metrics.confusion(
        [golds[i] for i in ids], [preds[i] for i in ids], len(class_names), class_names
    )
    report = metrics.score(cm)

    report_path = Path(args.report or f"{pred_path}.metrics.json")
    machine = {"task": config.task, "confusion": cm.as_dict(), **report.as_dict()}
    corpusio.write_atomic(report_path, json.dumps(machine, indent=2) + "\n")
    text = metrics.format_report(cm, report)
    corpusio.write_atomic(report_path.with_suffix(".txt"), text + "\n")
    print(text)
    return EXIT_OK


_COMMANDS = {
    "crawl": cmd_crawl,
    "normalize": cmd_normalize,
    "train": cmd_train,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _resolve_config(args)
        return _COMMANDS[args.command](config, args)
    except (
        CliInputError,
        ConfigError,
        ProfileError,
        labels.TableFormatError,
        corpusio.CorpusFormatError,
        classifier.ModelFormatError,
        textprep.VocabularyFormatError,
        encoder.EncoderError,
        FileNotFoundError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CliDataError, classifier.DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
