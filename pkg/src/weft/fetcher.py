"""Minimal polite HTTP acquisition: URL strategies in, archive records out.

Deliberately small: serious crawling (navigation, scripts, sessions)
belongs in per-source tooling that feeds explicit URL lists in here.
"""

import json
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field

from weft.errors import ConfigError, InputError, StoreError

PLACEHOLDER = "{}"


@dataclass
class FetchJob:
    source: str
    url_strategy: str = "explicit-list"  # "explicit-list" | "id-template"
    urls: list = field(default_factory=list)
    pattern: str = ""
    id_from: int = 0
    id_to: int = 0
    rate_limit: float = 1.0  # max requests/second; no ground truth, be polite
    retries: int = 2
    timeout: float = 10.0
    skip_existing: bool = False

    def __post_init__(self):
        if not self.source:
            raise InputError("fetch job needs a source code")
        if self.rate_limit <= 0:
            raise InputError("rate_limit must be positive")
        if self.retries < 0:
            raise InputError("retries must be >= 0")
        if self.url_strategy not in ("explicit-list", "id-template"):
            raise ConfigError(f"unknown url strategy {self.url_strategy!r}")
        if self.url_strategy == "id-template":
            if self.pattern.count(PLACEHOLDER) != 1:
                raise ConfigError("id-template pattern needs exactly one '{}' placeholder")
            if self.id_from > self.id_to:
                raise InputError("id_from must not exceed id_to")

    @classmethod
    def load(cls, path) -> "FetchJob":
        with open(path, encoding="utf-8") as handle:
            raw = json.load(handle)
        return cls(
            source=raw.get("source", ""),
            url_strategy=raw.get("urlStrategy", "explicit-list"),
            urls=raw.get("urls", []),
            pattern=raw.get("pattern", ""),
            id_from=raw.get("idFrom", 0),
            id_to=raw.get("idTo", 0),
            rate_limit=raw.get("rateLimit", 1.0),
            retries=raw.get("retries", 2),
            timeout=raw.get("timeout", 10.0),
            skip_existing=raw.get("skipExisting", False),
        )


@dataclass
class FetchReport:
    fetched: int = 0
    failed: int = 0
    skipped: int = 0

    @property
    def total(self):
        return self.fetched + self.failed + self.skipped


def generate_urls(job: FetchJob):
    """Deterministic URL sequence for a job."""
    if job.url_strategy == "explicit-list":
        return list(job.urls)
    return [job.pattern.replace(PLACEHOLDER, str(i)) for i in range(job.id_from, job.id_to + 1)]


def _request(url, timeout):
    """(status, content_type, body) for one HTTP request; None body on failure."""
    try:
        with urllib.request.urlopen(url, timeout=timeout) as response:
            return response.status, response.headers.get("Content-Type") or "", response.read()
    except urllib.error.HTTPError as exc:
        exc.read()
        return exc.code, "", None
    except (urllib.error.URLError, OSError, TimeoutError):
        return None, "", None


def fetch_and_archive(job: FetchJob, store, sleep=time.sleep, clock=time.monotonic) -> FetchReport:
    """Fetch every job URL sequentially and archive 2xx responses.

    Requests are spaced at 1/rate_limit seconds, retries included, so one
    job never exceeds its polite rate. Per-URL failures never abort the
    job; a store failure does.
    """
    report = FetchReport()
    interval = 1.0 / job.rate_limit
    last_request = None

    def pace():
        nonlocal last_request
        if last_request is not None:
            wait = interval - (clock() - last_request)
            if wait > 0:
                sleep(wait)
        last_request = clock()

    for url in generate_urls(job):
        if job.skip_existing and store.has_url(job.source, url):
            report.skipped += 1
            continue
        body = None
        content_type = ""
        for _attempt in range(job.retries + 1):
            pace()
            status, content_type, body = _request(url, job.timeout)
            if status is not None and 200 <= status < 300 and body is not None:
                break
            body = None
        if body is None:
            report.failed += 1
            continue
        try:
            store.put(job.source, url, content_type, body)
        except StoreError:
            raise
        report.fetched += 1
    return report
