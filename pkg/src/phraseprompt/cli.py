"""Command-line entry point.

Subcommands cover the whole pipeline: extract, build-db, db-stats, query,
promptify, mix, eval-bleu, eval-constraints, and verify. Exit codes: 0 on
success, 1 on usage errors, 2 on data or format errors (reported to stderr
as ``ERROR <code>: <detail>``). Identical argv, inputs, and seeds produce
identical outputs.

Options may also come from a ``key=value`` config file via ``--config``;
explicit flags win over the file, unknown keys are rejected.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .corpus import RESERVED_TOKENS, load_corpus
from .database import (
    IndexConfig,
    SearchParams,
    build_database,
    load_database,
    query,
    save_database,
    stats,
)
from .embed import FileVectorsProvider, HashedContextEmbedder, load_vectors_file, pool_phrase
from .errors import LengthMismatch, ReservedToken, ToolkitError
from .extract import extract_corpus_phrases, occurrences_to_tsv
from .metrics import ConstraintCase, bleu, constraint_accuracy
from .mixing import MixConfig, make_mixed_corpus
from .oracles import run_suite
from .prompts import (
    PromptConfig,
    constraints_for_sentence,
    parse_constraints_tsv,
    render_prompt,
    retrieve_prompt,
)

DEFAULT_EMBEDDER_SPEC = "64,2,42"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 instead of argparse's exit 2
        raise _UsageError(f"{self.format_usage()}error: {message}")


def _bool(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes", "on")


def _float_or_inf(text: str) -> float:
    return math.inf if text.strip().lower() in ("inf", "infinity") else float(text)


# config-file keys and how to cast their string values
CONFIG_CASTS = {
    "vectors": str,
    "builtin_embedder": str,
    "db": str,
    "out": str,
    "constraints": str,
    "max_len": int,
    "index": str,
    "nlist": int,
    "m": int,
    "nbits": int,
    "train_sample": int,
    "seed": int,
    "no_originals": _bool,
    "dedupe_exact": _bool,
    "k": int,
    "nprobe": int,
    "rerank_depth": int,
    "strategy": str,
    "tau": _float_or_inf,
    "max_pairs": int,
    "ratio": float,
    "no_exclude_self": _bool,
    "max_n": int,
    "smooth": _bool,
    "suite": str,
    "cases": int,
    "threads": int,
}


class Settings:
    """Merges CLI values (always win), config-file values, and defaults."""

    def __init__(self, args: argparse.Namespace, file_cfg: dict[str, str]):
        self._args = vars(args)
        self._cfg = file_cfg

    def get(self, key, default=None):
        value = self._args.get(key)
        if value is not None:
            return value
        if key in self._cfg:
            return CONFIG_CASTS[key](self._cfg[key])
        return default


def _load_config_file(path: str) -> dict[str, str]:
    cfg: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise _UsageError(f"config line {line!r} is not key=value")
        key, value = line.split("=", 1)
        key = key.strip().replace("-", "_")
        if key not in CONFIG_CASTS:
            raise _UsageError(f"unknown config key {key!r}")
        cfg[key] = value.strip()
    return cfg


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file; explicit flags win")
    p.add_argument(
        "--threads",
        type=int,
        help="worker threads; outputs are identical for any value (default: 1)",
    )


def _add_embedder_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--vectors", help="RPPV1 vectors file; overrides the built-in embedder")
    p.add_argument(
        "--builtin-embedder",
        dest="builtin_embedder",
        metavar="DIM,WINDOW,SEED",
        help="built-in deterministic embedder parameters (default: 64,2,42)",
    )


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--nprobe", type=int, help="IVF cells to probe (default: nlist/8)")
    p.add_argument(
        "--rerank-depth",
        dest="rerank_depth",
        type=int,
        help="candidates re-ranked on originals; 0 disables (default: 100)",
    )


def _add_prompt_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--strategy",
        choices=("greedy_cover", "all_ngrams"),
        help="span selection strategy (default: greedy_cover)",
    )
    p.add_argument(
        "--tau",
        type=_float_or_inf,
        help="acceptance threshold on squared L2 distance (default: inf)",
    )
    p.add_argument("--max-pairs", dest="max_pairs", type=int, help="prompt pair cap (default: 8)")
    p.add_argument(
        "--max-len", dest="max_len", type=int, help="maximum phrase span length (default: 4)"
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="phraseprompt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("extract", help="extract phrase occurrences to TSV")
    p.add_argument("src"), p.add_argument("tgt"), p.add_argument("align")
    p.add_argument("--max-len", dest="max_len", type=int, help="max span length (default: 4)")
    p.add_argument("--out", help="output TSV path (default: stdout)")
    _add_common(p)
    p.set_defaults(run=_cmd_extract)

    p = sub.add_parser("build-db", help="build and save a phrase database")
    p.add_argument("src"), p.add_argument("tgt"), p.add_argument("align")
    p.add_argument("--out", required=True, help="database file to write")
    p.add_argument("--max-len", dest="max_len", type=int, help="max span length (default: 4)")
    p.add_argument("--index", choices=("flat", "ivfpq"), help="index kind (default: flat)")
    p.add_argument("--nlist", type=int, help="coarse cells (default: ceil(sqrt(n)), max 4096)")
    p.add_argument("--m", type=int, help="PQ sub-quantizers (default: 8)")
    p.add_argument("--nbits", type=int, help="bits per PQ code (default: 8)")
    p.add_argument(
        "--train-sample", dest="train_sample", type=int,
        help="training sample size (default: min(n, 100*nlist))",
    )
    p.add_argument("--seed", type=int, help="index training seed (default: 0)")
    p.add_argument(
        "--no-originals", dest="no_originals", action="store_const", const=True,
        help="drop original vectors from an IVF-PQ index (disables re-ranking)",
    )
    p.add_argument(
        "--dedupe-exact", dest="dedupe_exact", action="store_const", const=True,
        help="collapse entries with identical phrases and bitwise-equal vectors",
    )
    _add_embedder_flags(p)
    _add_common(p)
    p.set_defaults(run=_cmd_build_db)

    p = sub.add_parser("db-stats", help="print database statistics")
    p.add_argument("db")
    _add_common(p)
    p.set_defaults(run=_cmd_db_stats)

    p = sub.add_parser("query", help="retrieve nearest phrase pairs for a text")
    p.add_argument("db")
    p.add_argument("text", help="whitespace-tokenized query text")
    p.add_argument("--k", type=int, help="hits to return (default: 5)")
    _add_search_flags(p)
    _add_embedder_flags(p)
    _add_common(p)
    p.set_defaults(run=_cmd_query)

    p = sub.add_parser("promptify", help="write one prompted line per input line")
    p.add_argument("input", help="source file, one sentence per line")
    p.add_argument("--db", help="phrase database (needed unless --constraints is given)")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument(
        "--constraints",
        help="TSV src\\ttgt pairs applied to every sentence containing the source phrase",
    )
    _add_prompt_flags(p)
    _add_search_flags(p)
    _add_embedder_flags(p)
    _add_common(p)
    p.set_defaults(run=_cmd_promptify)

    p = sub.add_parser("mix", help="write prompt-aware co-training data")
    p.add_argument("src"), p.add_argument("tgt")
    p.add_argument("--db", required=True, help="phrase database")
    p.add_argument("--out", required=True, help="output prefix; writes OUT.src and OUT.tgt")
    p.add_argument("--ratio", type=float, help="fraction of sentences augmented (default: 1.0)")
    p.add_argument("--seed", type=int, help="selection seed (default: 0)")
    p.add_argument(
        "--no-exclude-self", dest="no_exclude_self", action="store_const", const=True,
        help="allow retrieving pairs extracted from the sentence being augmented",
    )
    _add_prompt_flags(p)
    _add_search_flags(p)
    _add_embedder_flags(p)
    _add_common(p)
    p.set_defaults(run=_cmd_mix)

    p = sub.add_parser("eval-bleu", help="corpus BLEU of a hypothesis file")
    p.add_argument("hyp"), p.add_argument("ref")
    p.add_argument("--max-n", dest="max_n", type=int, help="n-gram order (default: 4)")
    p.add_argument(
        "--smooth", action="store_const", const=True,
        help="add-one smoothing on orders >= 2 for short fixtures",
    )
    _add_common(p)
    p.set_defaults(run=_cmd_eval_bleu)

    p = sub.add_parser("eval-constraints", help="lexical constraint accuracy")
    p.add_argument("hyp")
    p.add_argument("constraints", help="TSV src\\ttgt, one case per hypothesis line")
    _add_common(p)
    p.set_defaults(run=_cmd_eval_constraints)

    p = sub.add_parser("verify", help="run a brute-force oracle suite")
    p.add_argument(
        "--suite", required=True, choices=("extract", "knn", "bleu", "roundtrip")
    )
    p.add_argument("--cases", type=int, help="number of random cases (suite default)")
    p.add_argument("--seed", type=int, help="case generator seed (suite default)")
    _add_common(p)
    p.set_defaults(run=_cmd_verify)

    return parser


# --- helpers ---------------------------------------------------------------


def _provider(settings: Settings):
    vectors_path = settings.get("vectors")
    if vectors_path:
        return FileVectorsProvider(load_vectors_file(vectors_path))
    triple = settings.get("builtin_embedder", DEFAULT_EMBEDDER_SPEC)
    parts = triple.split(",")
    if len(parts) != 3:
        raise _UsageError("--builtin-embedder expects DIM,WINDOW,SEED")
    return HashedContextEmbedder(int(parts[0]), int(parts[1]), int(parts[2]))


def _search_params(settings: Settings) -> SearchParams:
    return SearchParams(
        nprobe=settings.get("nprobe"), rerank_depth=settings.get("rerank_depth")
    )


def _prompt_config(settings: Settings) -> PromptConfig:
    return PromptConfig(
        strategy=settings.get("strategy", "greedy_cover"),
        max_len=settings.get("max_len", 4),
        max_pairs=settings.get("max_pairs", 8),
        tau=settings.get("tau", math.inf),
        search=_search_params(settings),
    )


def _checked_line_tokens(line: str, line_no: int) -> list[str]:
    tokens = line.split()
    for tok in tokens:
        if tok in RESERVED_TOKENS:
            raise ReservedToken(f"input line {line_no}: {tok!r} is a reserved marker")
    return tokens


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)


def _read_token_lines(path: str) -> list[list[str]]:
    return [line.split() for line in Path(path).read_text(encoding="utf-8").splitlines()]


# --- subcommands -----------------------------------------------------------


def _cmd_extract(args, settings: Settings) -> int:
    corpus = load_corpus(args.src, args.tgt, args.align)
    occurrences = extract_corpus_phrases(corpus, settings.get("max_len", 4))
    _write_text(settings.get("out"), occurrences_to_tsv(occurrences))
    return 0


def _cmd_build_db(args, settings: Settings) -> int:
    corpus = load_corpus(args.src, args.tgt, args.align)
    cfg = IndexConfig(
        kind=settings.get("index", "flat"),
        nlist=settings.get("nlist"),
        m=settings.get("m", 8),
        nbits=settings.get("nbits", 8),
        train_sample=settings.get("train_sample"),
        seed=settings.get("seed", 0),
        keep_originals=not settings.get("no_originals", False),
    )
    db = build_database(
        corpus,
        _provider(settings),
        max_len=settings.get("max_len", 4),
        index_config=cfg,
        dedupe_exact=settings.get("dedupe_exact", False),
    )
    save_database(db, args.out)
    return 0


def _cmd_db_stats(args, settings: Settings) -> int:
    s = stats(load_database(args.db))
    for key in ("entry_count", "distinct_src_phrases", "distinct_pairs", "dim"):
        print(f"{key}={getattr(s, key)}")
    return 0


def _cmd_query(args, settings: Settings) -> int:
    db = load_database(args.db)
    provider = _provider(settings)
    tokens = _checked_line_tokens(args.text, 0)
    tv = provider.embed(tokens, sentence_id=0)
    vec = pool_phrase(tv, (0, len(tokens)))
    hits = query(db, vec, settings.get("k", 5), _search_params(settings))
    for entry, dist in hits:
        print(f"{dist:.6f}\t{entry.src_phrase}\t{entry.tgt_phrase}")
    return 0


def _cmd_promptify(args, settings: Settings) -> int:
    lines = Path(args.input).read_text(encoding="utf-8").splitlines()
    constraints_path = settings.get("constraints")
    out_lines = []
    if constraints_path:
        constraints = parse_constraints_tsv(
            Path(constraints_path).read_text(encoding="utf-8")
        )
        for i, line in enumerate(lines):
            tokens = _checked_line_tokens(line, i)
            prompt = constraints_for_sentence(constraints, tokens)
            out_lines.append(render_prompt(prompt, tokens))
    else:
        db_path = settings.get("db")
        if db_path is None:
            raise _UsageError("promptify needs --db unless --constraints is given")
        db = load_database(db_path)
        provider = _provider(settings)
        cfg = _prompt_config(settings)
        for i, line in enumerate(lines):
            tokens = _checked_line_tokens(line, i)
            prompt = retrieve_prompt(db, tokens, provider, cfg, sentence_id=i)
            out_lines.append(render_prompt(prompt, tokens))
    _write_text(settings.get("out"), "".join(line + "\n" for line in out_lines))
    return 0


def _cmd_mix(args, settings: Settings) -> int:
    corpus = load_corpus(args.src, args.tgt)
    db = load_database(args.db)
    cfg = MixConfig(
        ratio=settings.get("ratio", 1.0),
        seed=settings.get("seed", 0),
        exclude_self=not settings.get("no_exclude_self", False),
        prompt_config=_prompt_config(settings),
    )
    src_lines, tgt_lines = make_mixed_corpus(corpus, db, _provider(settings), cfg)
    prefix = args.out
    _write_text(prefix + ".src", "".join(line + "\n" for line in src_lines))
    _write_text(prefix + ".tgt", "".join(line + "\n" for line in tgt_lines))
    return 0


def _cmd_eval_bleu(args, settings: Settings) -> int:
    hyps = _read_token_lines(args.hyp)
    refs = _read_token_lines(args.ref)
    score = bleu(hyps, refs, max_n=settings.get("max_n", 4), smooth=settings.get("smooth", False))
    print(f"BLEU={score:.2f}")
    return 0


def _cmd_eval_constraints(args, settings: Settings) -> int:
    hyps = _read_token_lines(args.hyp)
    constraints = parse_constraints_tsv(Path(args.constraints).read_text(encoding="utf-8"))
    if len(hyps) != len(constraints):
        raise LengthMismatch(
            f"{len(hyps)} hypothesis lines vs {len(constraints)} constraint cases"
        )
    cases = [
        ConstraintCase(tuple(hyp), tuple(tgt.split()))
        for hyp, (_, tgt) in zip(hyps, constraints)
    ]
    print(f"accuracy={constraint_accuracy(cases):.4f}")
    return 0


def _cmd_verify(args, settings: Settings) -> int:
    kwargs = {}
    if settings.get("cases") is not None:
        kwargs["cases"] = settings.get("cases")
    if settings.get("seed") is not None:
        kwargs["seed"] = settings.get("seed")
    report = run_suite(args.suite, **kwargs)
    print(f"cases={report.case_count} mismatches={report.mismatch_count}")
    if report.first_mismatch:
        print(f"first mismatch: {report.first_mismatch}", file=sys.stderr)
    return 0 if report.mismatch_count == 0 else 2


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        file_cfg = _load_config_file(args.config) if args.config else {}
        settings = Settings(args, file_cfg)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return 0 if (exc.code or 0) == 0 else 1
    try:
        return args.run(args, settings)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except ToolkitError as exc:
        print(f"ERROR {exc.code}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ERROR IoError: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
