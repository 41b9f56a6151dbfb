"""Materialization of match streams: TSV export, frequency aggregation,
and figure rendering for aggregate tables."""

from collections import Counter
from dataclasses import dataclass

FIXED_COLUMNS = ("doc_id", "sent_id", "sentence_text")
CAPTURE_COLUMNS = ("name", "text", "token_start", "token_end",
                   "char_start", "char_end")


def escape_field(value: str) -> str:
    return (value.replace("\\", "\\\\").replace("\t", "\\t")
            .replace("\n", "\\n").replace("\r", "\\r"))


def unescape_field(value: str) -> str:
    out = []
    i = 0
    while i < len(value):
        c = value[i]
        if c == "\\" and i + 1 < len(value):
            nxt = value[i + 1]
            mapped = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}.get(nxt)
            if mapped is not None:
                out.append(mapped)
                i += 2
                continue
        out.append(c)
        i += 1
    return "".join(out)


def tsv_header(capture_names):
    cols = list(FIXED_COLUMNS)
    for name in sorted(capture_names):
        cols.extend("%s_%s" % (name, c) for c in CAPTURE_COLUMNS)
    return cols


def to_tsv(matches, sink, capture_names, sentence_lookup) -> int:
    """Write matches as escaped TSV; returns the number of data rows.

    ``sentence_lookup(ordinal)`` must return the sentence text. Absent
    optional captures emit empty cells.
    """
    names = sorted(capture_names)
    sink.write("\t".join(tsv_header(names)) + "\n")
    count = 0
    for match in matches:
        row = [escape_field(match.doc_id), escape_field(match.sent_id),
               escape_field(sentence_lookup(match.ordinal))]
        for name in names:
            span = match.captures.get(name)
            if span is None:
                row.extend([""] * len(CAPTURE_COLUMNS))
            else:
                row.extend([escape_field(name), escape_field(span.text),
                            str(span.token_start), str(span.token_end),
                            str(span.char_start), str(span.char_end)])
        sink.write("\t".join(row) + "\n")
        count += 1
    return count


def parse_tsv(lines):
    """Inverse of to_tsv: yields (header cols, rows of unescaped fields)."""
    it = iter(lines)
    header = next(it).rstrip("\n").split("\t")
    rows = []
    for line in it:
        if not line.strip("\n"):
            continue
        rows.append([unescape_field(f) for f in line.rstrip("\n").split("\t")])
    return header, rows


@dataclass
class FrequencyTable:
    capture: str
    # (case-folded key, most frequent raw display form, count)
    rows: list
    excluded: int  # matches lacking the capture

    @property
    def total(self):
        return sum(count for _key, _disp, count in self.rows)


def aggregate_by_capture(matches, name: str) -> FrequencyTable:
    """Group matches by the case-folded text of one capture.

    The display form of a group is its most frequent raw form (ties:
    lexicographically smallest). Rows are ordered by count descending,
    key ascending.
    """
    counts = Counter()
    raw_forms = {}
    excluded = 0
    for match in matches:
        span = match.captures.get(name)
        if span is None:
            excluded += 1
            continue
        key = span.text.casefold()
        counts[key] += 1
        raw_forms.setdefault(key, Counter())[span.text] += 1
    rows = []
    for key, count in counts.items():
        forms = raw_forms[key]
        display = min(forms, key=lambda form: (-forms[form], form))
        rows.append((key, display, count))
    rows.sort(key=lambda r: (-r[2], r[0]))
    return FrequencyTable(capture=name, rows=rows, excluded=excluded)


def frequency_table_to_tsv(table: FrequencyTable, sink) -> int:
    sink.write("capture_text\tdisplay_form\tcount\n")
    for key, display, count in table.rows:
        sink.write("%s\t%s\t%d\n" % (escape_field(key),
                                     escape_field(display), count))
    return len(table.rows)


def plot_frequency_table(table: FrequencyTable, path, top=25):
    """Render the top rows of a frequency table as a horizontal bar chart."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = table.rows[:top]
    labels = [display for _key, display, _count in rows][::-1]
    values = [count for _key, _display, count in rows][::-1]
    height = max(2.0, 0.35 * len(rows) + 1.2)
    fig, ax = plt.subplots(figsize=(8, height))
    ax.barh(range(len(values)), values, color="#4878b0")
    ax.set_yticks(range(len(values)))
    ax.set_yticklabels(labels, fontsize=8)
    ax.set_xlabel("matches")
    ax.set_title("capture %r by frequency" % table.capture)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
