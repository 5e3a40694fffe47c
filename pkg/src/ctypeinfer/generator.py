"""Deterministic synthetic Java corpus for end-to-end checks.

Each pseudo-project gets a ``Settings`` helper with typed getters and a few
worker classes whose methods call registry APIs. Argument expressions are
drawn from per-c-type vocabularies; URL arguments are often concatenations
of host/path/port words, which makes URL the hardest class by design.
"""

from __future__ import annotations

import random
from pathlib import Path
from typing import Union

# slot -> [(expression, {variable: declared type})]
VOCAB: dict[str, list[tuple[str, dict[str, str]]]] = {
    "PATH": [
        ("path", {"path": "String"}),
        ("filePath", {"filePath": "String"}),
        ("fileName", {"fileName": "String"}),
        ("pathname", {"pathname": "String"}),
        ("settings.getPath()", {"settings": "Settings"}),
        ("settings.getFilePath(index)", {"settings": "Settings", "index": "int"}),
        ("dir.getPath()", {"dir": "File"}),
        ("file.getAbsolutePath()", {"file": "File"}),
        ("baseDir + fileName", {"baseDir": "String", "fileName": "String"}),
        ("getFilePath()", {}),
        ("tempPath", {"tempPath": "String"}),
    ],
    "URL": [
        ("url", {"url": "String"}),
        ("urlString", {"urlString": "String"}),
        ("baseUrl", {"baseUrl": "String"}),
        ("settings.getUrl()", {"settings": "Settings"}),
        ("request.getUrl()", {"request": "Request"}),
        ("uriText", {"uriText": "String"}),
        ('"http://" + host + ":" + port + "/"', {"host": "String", "port": "int"}),
        ("server + filePath", {"server": "String", "filePath": "String"}),
        ('"file:" + path', {"path": "String"}),
        ('hostName + "/" + resourcePath', {"hostName": "String", "resourcePath": "String"}),
        ("settings.getHost() + path", {"settings": "Settings", "path": "String"}),
    ],
    "SQL": [
        ("sql", {"sql": "String"}),
        ("query", {"query": "String"}),
        ("settings.getQuery()", {"settings": "Settings"}),
        ("buildSql(tableName)", {"tableName": "String"}),
        ("createQuery(fields)", {"fields": "String"}),
        ("insertSql", {"insertSql": "String"}),
    ],
    "HOST": [
        ("host", {"host": "String"}),
        ("hostName", {"hostName": "String"}),
        ("settings.getHost()", {"settings": "Settings"}),
        ("address.getHostName()", {"address": "InetAddress"}),
        ("serverHost", {"serverHost": "String"}),
        ("remoteHost", {"remoteHost": "String"}),
        ("getHostAddress()", {}),
    ],
    "PORT": [
        ("port", {"port": "int"}),
        ("localPort", {"localPort": "int"}),
        ("serverPort", {"serverPort": "int"}),
        ("settings.getPort()", {"settings": "Settings"}),
        ("port + 1", {"port": "int"}),
        ("getLocalPort()", {}),
        ("Integer.parseInt(portText)", {"portText": "String"}),
    ],
    "XCOORD": [
        ("x", {"x": "int"}),
        ("e.getX()", {"e": "MouseEvent"}),
        ("getX()", {}),
        ("bounds.x", {"bounds": "Rectangle"}),
        ("x + dx", {"x": "int", "dx": "int"}),
        ("startX", {"startX": "int"}),
        ("left", {"left": "int"}),
        ("offsetX", {"offsetX": "int"}),
    ],
    "YCOORD": [
        ("y", {"y": "int"}),
        ("e.getY()", {"e": "MouseEvent"}),
        ("getY()", {}),
        ("bounds.y", {"bounds": "Rectangle"}),
        ("y + dy", {"y": "int", "dy": "int"}),
        ("startY", {"startY": "int"}),
        ("top", {"top": "int"}),
        ("offsetY", {"offsetY": "int"}),
    ],
    "WIDTH": [
        ("width", {"width": "int"}),
        ("getWidth()", {}),
        ("size.width", {"size": "Dimension"}),
        ("imageWidth", {"imageWidth": "int"}),
        ("width - 2 * margin", {"width": "int", "margin": "int"}),
        ("(int) bounds.getWidth()", {"bounds": "Rectangle"}),
        ("panelWidth", {"panelWidth": "int"}),
    ],
    "HEIGHT": [
        ("height", {"height": "int"}),
        ("getHeight()", {}),
        ("size.height", {"size": "Dimension"}),
        ("imageHeight", {"imageHeight": "int"}),
        ("height - 2 * margin", {"height": "int", "margin": "int"}),
        ("(int) bounds.getHeight()", {"bounds": "Rectangle"}),
        ("panelHeight", {"panelHeight": "int"}),
    ],
    "YEAR": [
        ("year", {"year": "int"}),
        ("startYear", {"startYear": "int"}),
        ("settings.getYear()", {"settings": "Settings"}),
        ("year - 1900", {"year": "int"}),
        ("birthYear", {"birthYear": "int"}),
    ],
    "MONTH": [
        ("month", {"month": "int"}),
        ("Calendar.JANUARY", {}),
        ("Calendar.DECEMBER", {}),
        ("month - 1", {"month": "int"}),
        ("settings.getMonth()", {"settings": "Settings"}),
        ("startMonth", {"startMonth": "int"}),
    ],
    "DAY": [
        ("day", {"day": "int"}),
        ("dayOfMonth", {"dayOfMonth": "int"}),
        ("settings.getDay()", {"settings": "Settings"}),
        ("Integer.parseInt(dayText)", {"dayText": "String"}),
        ("lastDay", {"lastDay": "int"}),
    ],
    "BOOL": [("append", {"append": "boolean"}), ("true", {})],
    "BACKLOG": [("backlog", {"backlog": "int"}), ("maxQueue", {"maxQueue": "int"})],
    "TEXT": [("label", {"label": "String"}), ("message", {"message": "String"}),
             ("title", {"title": "String"})],
    "IMG": [("image", {"image": "Image"}), ("icon", {"icon": "Image"})],
    "OBS": [("this", {}), ("observer", {"observer": "ImageObserver"})],
    "FILE": [("parentDir", {"parentDir": "File"}), ("baseFolder", {"baseFolder": "File"})],
    "HOUR": [("hour", {"hour": "int"}), ("hourOfDay", {"hourOfDay": "int"})],
    "MIN": [("minute", {"minute": "int"}), ("minutes", {"minutes": "int"})],
}

# (weight, template with {SLOT} placeholders, extra declarations)
CALLS: list[tuple[int, str, dict[str, str]]] = [
    (5, "new File({PATH})", {}),
    (2, "new FileInputStream({PATH})", {}),
    (2, "new FileReader({PATH})", {}),
    (2, "Paths.get({PATH})", {}),
    (1, "new File({FILE}, {PATH})", {}),
    (1, "new FileOutputStream({PATH}, {BOOL})", {}),
    (3, "new URL({URL})", {}),
    (3, "new URI({URL})", {}),
    (2, "URI.create({URL})", {}),
    (2, "stmt.execute({SQL})", {"stmt": "Statement"}),
    (2, "stmt.executeQuery({SQL})", {"stmt": "Statement"}),
    (2, "conn.prepareStatement({SQL})", {"conn": "Connection"}),
    (3, "new Socket({HOST}, {PORT})", {}),
    (2, "new InetSocketAddress({HOST}, {PORT})", {}),
    (2, "InetAddress.getByName({HOST})", {}),
    (2, "new ServerSocket({PORT})", {}),
    (1, "new ServerSocket({PORT}, {BACKLOG})", {}),
    (1, "new DatagramSocket({PORT})", {}),
    (3, "new Point({XCOORD}, {YCOORD})", {}),
    (3, "new Dimension({WIDTH}, {HEIGHT})", {}),
    (2, "setBounds({XCOORD}, {YCOORD}, {WIDTH}, {HEIGHT})", {}),
    (2, "g.fillRect({XCOORD}, {YCOORD}, {WIDTH}, {HEIGHT})", {"g": "Graphics"}),
    (1, "g.drawString({TEXT}, {XCOORD}, {YCOORD})", {"g": "Graphics"}),
    (1, "g.drawImage({IMG}, {XCOORD}, {YCOORD}, {OBS})", {"g": "Graphics"}),
    (2, "setSize({WIDTH}, {HEIGHT})", {}),
    (2, "setLocation({XCOORD}, {YCOORD})", {}),
    (3, "new Date({YEAR}, {MONTH}, {DAY})", {}),
    (3, "LocalDate.of({YEAR}, {MONTH}, {DAY})", {}),
    (2, "cal.set({YEAR}, {MONTH}, {DAY})", {"cal": "Calendar"}),
    (1, "new Date({YEAR}, {MONTH}, {DAY}, {HOUR}, {MIN})", {}),
    (1, "date.setYear({YEAR})", {"date": "Date"}),
    (1, "YearMonth.of({YEAR}, {MONTH})", {}),
    (1, "MonthDay.of({MONTH}, {DAY})", {}),
    (1, "date.setDate({DAY})", {"date": "Date"}),
]

IMPORTS = """\
import java.awt.*;
import java.awt.event.MouseEvent;
import java.awt.image.ImageObserver;
import java.io.*;
import java.net.*;
import java.nio.file.Paths;
import java.sql.Connection;
import java.sql.Statement;
import java.time.LocalDate;
import java.time.MonthDay;
import java.time.YearMonth;
import java.util.Calendar;
import java.util.Date;
import javax.swing.JPanel;
"""

SETTINGS = """\
package {pkg};

public class Settings {{
    public String getPath() {{ return null; }}
    public String getFilePath(int index) {{ return null; }}
    public String getUrl() {{ return null; }}
    public String getQuery() {{ return null; }}
    public String getHost() {{ return null; }}
    public int getPort() {{ return 0; }}
    public int getYear() {{ return 0; }}
    public int getMonth() {{ return 0; }}
    public int getDay() {{ return 0; }}
}}
"""

REQUEST = """\
package {pkg};

public class Request {{
    public String getUrl() {{ return null; }}
}}
"""

WORKER_HELPERS = """\
    String getFilePath() { return null; }
    String getHostAddress() { return null; }
    int getLocalPort() { return 0; }
    String buildSql(String table) { return null; }
    String createQuery(String fields) { return null; }
"""

PROJECT_NAMES = ("alpha", "bravo", "charlie", "delta", "echo", "foxtrot")

def _slots(template: str) -> list[str]:
    out = []
    rest = template
    while "{" in rest:
        a = rest.index("{")
        b = rest.index("}", a)
        out.append(rest[a + 1:b])
        rest = rest[b + 1:]
    return out


def _render_call(rng: random.Random, vocab: dict, template: str,
                 decls: dict[str, str]) -> str:
    text = template
    for slot in _slots(template):
        expr, need = rng.choice(vocab[slot])
        for name, t in need.items():
            if decls.setdefault(name, t) != t:
                raise AssertionError(f"variable {name} declared with two types")
        text = text.replace("{" + slot + "}", expr, 1)
    return text


def generate_project(root: Union[str, Path], name: str, seed: int,
                     n_files: int = 4, n_methods: int = 5, n_calls: int = 4) -> Path:
    """Write one pseudo-project and return its root directory."""
    rng = random.Random(f"{seed}:{name}")
    pkg = f"org.{name}.app"
    base = Path(root) / name
    src = base / "src" / Path(*pkg.split("."))
    src.mkdir(parents=True, exist_ok=True)
    (src / "Settings.java").write_text(SETTINGS.format(pkg=pkg), encoding="utf-8")
    (src / "Request.java").write_text(REQUEST.format(pkg=pkg), encoding="utf-8")
    # each project leans on its own subset of the vocabulary
    vocab = {}
    for slot, items in VOCAB.items():
        keep = max(2, round(len(items) * 0.75))
        vocab[slot] = sorted(rng.sample(items, min(keep, len(items))))
    weights = [w for w, _, _ in CALLS]
    for fi in range(n_files):
        cls = f"Worker{fi}"
        lines = [f"package {pkg};", "", IMPORTS, f"public class {cls} extends JPanel {{",
                 WORKER_HELPERS]
        for mi in range(n_methods):
            decls: dict[str, str] = {}
            body = []
            for _ in range(n_calls):
                _, template, extra = rng.choices(CALLS, weights=weights)[0]
                for k, v in extra.items():
                    decls.setdefault(k, v)
                body.append(f"        {_render_call(rng, vocab, template, decls)};")
            params = ", ".join(f"{t} {n}" for n, t in sorted(decls.items()))
            lines.append(f"    void task{mi}({params}) throws Exception {{")
            lines.extend(body)
            lines.append("    }")
            lines.append("")
        lines.append("}")
        (src / f"{cls}.java").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return base


def generate_corpus(root: Union[str, Path], n_projects: int = 4, seed: int = 7,
                    **sizes) -> list[tuple[str, Path]]:
    """Write ``n_projects`` pseudo-projects under ``root``; returns (name, path) pairs."""
    if not 1 <= n_projects <= len(PROJECT_NAMES):
        raise ValueError(f"n_projects must be in 1..{len(PROJECT_NAMES)}")
    return [(name, generate_project(root, name, seed, **sizes))
            for name in PROJECT_NAMES[:n_projects]]


def write_manifest(projects: list[tuple[str, Path]], path: Union[str, Path]):
    Path(path).write_text("".join(f"{n}\t{p}\n" for n, p in projects), encoding="utf-8")
