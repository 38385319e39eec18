"""Crawl a small fact-checking site politely and print the extracted records.

The demo builds a four-page site in a temp directory, serves it over local
HTTP, and walks through what the crawler does: breadth-first traversal from
the seeds, robots.txt enforcement, per-host rate limiting, selector-driven
extraction, and the final crawl report.

Run: python3 demos/01_crawl_a_site.py
"""

import tempfile
import threading
from functools import partial
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from factpipe import PoliteFetcher, SiteProfile, crawl_site

PAGES = {
    "index.html": """
        <html><body>
        <h1>DemoCheck</h1>
        <ul>
          <li><a href="/moon-cheese.html">Is the moon made of cheese?</a></li>
          <li><a href="/tax-rumor.html">Viral tax rumor</a></li>
        </ul>
        <a href="/secret/draft.html">drafts</a>
        </body></html>
    """,
    "moon-cheese.html": """
        <html><body><article>
        <h1 class="headline">Is the moon made of cheese?</h1>
        <span class="verdict">False</span>
        <span class="topic">Education</span>
        <div class="date-line">2021-04-01</div>
        <div class="article-body"><p>Lunar samples are basalt, not brie.</p></div>
        </article></body></html>
    """,
    "tax-rumor.html": """
        <html><body><article>
        <h1 class="headline">Viral tax rumor</h1>
        <span class="verdict">Mostly True</span>
        <span class="topic">Economy</span>
        <div class="article-body"><p>The bracket change is real but applies
        to 2023 income, not retroactively.</p></div>
        </article></body></html>
    """,
    "secret/draft.html": "<html><body>robots should never fetch this</body></html>",
    "robots.txt": "User-agent: *\nDisallow: /secret/\n",
}


def serve(directory: Path) -> ThreadingHTTPServer:
    handler = partial(SimpleHTTPRequestHandler, directory=str(directory))
    handler.log_message = lambda *a: None
    httpd = ThreadingHTTPServer(("127.0.0.1", 0), handler)
    threading.Thread(target=httpd.serve_forever, daemon=True).start()
    return httpd


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        for name, content in PAGES.items():
            path = root / name
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(content, encoding="utf-8")

        httpd = serve(root)
        host, port = httpd.server_address
        base = f"http://{host}:{port}"
        print(f"serving the demo site at {base}\n")

        profile = SiteProfile(
            site_id="democheck",
            display_name="DemoCheck",
            seed_urls=(f"{base}/index.html",),
            extraction_rules={
                "title": "article h1.headline",
                "body": "div.article-body",
                "raw_verdict": "span.verdict",
                "raw_topic": "span.topic",
                "published_at": "div.date-line",
            },
            rate_limit_ms=200,
        )

        fetcher = PoliteFetcher(timeout_s=5.0)
        records, report = crawl_site(profile, budget=10, fetcher=fetcher)

        for record in records:
            print(f"- {record.title}")
            print(f"  verdict={record.raw_verdict!r} topic={record.raw_topic!r}"
                  f" published={record.published_at}")
            print(f"  {record.body_text[:70]}...")
        print()
        print("crawl report:", report.as_dict())
        print("note: /secret/draft.html was skipped because robots.txt disallows it")
        httpd.shutdown()


if __name__ == "__main__":
    main()
