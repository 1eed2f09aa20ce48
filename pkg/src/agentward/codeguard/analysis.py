"""Source-to-sink flow analysis over Python scripts.

The analyzer walks the AST, taints variables assigned from sensitive sources
(credential files, the environment, the clipboard, screen capture, key
events), chains taint through assignments, f-strings, slices, and local
helper-function returns, and reports a flow whenever tainted data reaches an
external sink (network, DNS, clipboard write, metadata embedding, writes to
system paths). Independently it looks for a small set of hard attack tokens
that are only counted in an exploit context: a write that targets
authorized_keys or /etc/hosts, an event-tap installation, a stdlib shadow
module dropped on the import path, a global git hooksPath rewrite, a
PYTHONPATH line persisted to a shell rc, a clipboard wallet substitution.

Reads alone never flow. A script that greps ~/.ssh and prints locally has a
source and no sink; a self-targeted port scan has neither. Flow tracking is
assignment/argument chaining, not full dataflow; the seed corpus is sized so
the approximation is exact on it.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass

SENSITIVE_SOURCES = frozenset(
    {"credential_file", "environment", "clipboard", "screen_capture", "key_events"}
)
EXTERNAL_SINKS = frozenset(
    {"dns", "network", "clipboard_write", "metadata_embed", "system_write"}
)

CRED_HINTS = (
    ".ssh",
    "id_rsa",
    "id_ed25519",
    "id_ecdsa",
    ".aws",
    "credentials",
    ".netrc",
    ".npmrc",
    ".pypirc",
    "keychain",
    ".kube/config",
    "secrets",
    "/etc/shadow",
)
LOG_HINTS = ("/var/log",)
RC_HINTS = (".zshrc", ".bashrc", ".bash_profile", ".profile", ".zprofile")
SYSTEM_WRITE_HINTS = ("/etc/", "/usr/", "/boot/", "/library/launchdaemons", "site-packages")
STDLIB_SHADOW = frozenset(
    {"json.py", "os.py", "sys.py", "pathlib.py", "subprocess.py", "requests.py", "urllib.py"}
)
REMOTE_TOOLS = frozenset({"curl", "wget", "nc", "ncat", "scp", "rsync-remote"})
LOCAL_HOSTS = frozenset({"127.0.0.1", "localhost", "::1", "0.0.0.0"})
KNOWN_API_HOSTS = frozenset(
    {
        "api.github.com",
        "api.gitlab.com",
        "pypi.org",
        "files.pythonhosted.org",
        "registry.npmjs.org",
        "api.openai.com",
        "api.anthropic.com",
        "www.googleapis.com",
        "graph.microsoft.com",
        "api.slack.com",
    }
)

_WALLET_RE = re.compile(r"\b(?:bc1[a-z0-9]{24,}|[13][a-km-zA-HJ-NP-Z1-9]{25,34})\b")
_URL_RE = re.compile(r"https?://([^/\s:\"']+)")

_READ_METHODS = {"read_text", "read_bytes", "read", "readlines", "readline"}
_WRITE_METHODS = {"write_text", "write_bytes", "write", "writelines"}
_HTTP_CALLS = {
    "urllib.request.urlopen",
    "requests.get",
    "requests.post",
    "requests.put",
    "requests.patch",
    "requests.delete",
    "requests.request",
    "http.client.HTTPConnection",
    "http.client.HTTPSConnection",
}
_DNS_CALLS = {"socket.gethostbyname", "socket.gethostbyname_ex", "socket.getaddrinfo"}
_SUBPROCESS_CALLS = {
    "subprocess.run",
    "subprocess.call",
    "subprocess.check_call",
    "subprocess.check_output",
    "subprocess.Popen",
    "os.system",
}


@dataclass(frozen=True)
class Flow:
    source: str
    sink: str
    via: str


@dataclass(frozen=True)
class ScriptAnalysis:
    sources: tuple[str, ...]
    sinks: tuple[str, ...]
    flows: tuple[Flow, ...]
    tokens: tuple[str, ...]
    parse_mode: str = "ast"


def _qual_name(node: ast.AST) -> str:
    parts = []
    while isinstance(node, ast.Attribute):
        parts.append(node.attr)
        node = node.value
    if isinstance(node, ast.Name):
        parts.append(node.id)
    elif isinstance(node, ast.Call):
        inner = _qual_name(node.func)
        if inner:
            parts.append(inner + "()")
    return ".".join(reversed(parts))


def _names_in(node: ast.AST) -> set[str]:
    out = set()
    for sub in ast.walk(node):
        if isinstance(sub, ast.Name):
            out.add(sub.id)
    return out


def _strings_in(node: ast.AST) -> set[str]:
    out = set()
    for sub in ast.walk(node):
        if isinstance(sub, ast.Constant) and isinstance(sub.value, str):
            out.add(sub.value)
    return out


def _kind_from_hints(hints: set[str]) -> str:
    joined = "\n".join(h.lower() for h in hints)
    if any(h in joined for h in CRED_HINTS):
        return "credential_file"
    if any(h in joined for h in LOG_HINTS):
        return "system_log"
    return "file_read"


def _argv0(call: ast.Call) -> str:
    """First token of a subprocess argv, when statically visible."""
    if not call.args:
        return ""
    head = call.args[0]
    if isinstance(head, ast.List) and head.elts:
        first = head.elts[0]
        if isinstance(first, ast.Constant) and isinstance(first.value, str):
            return first.value.rsplit("/", 1)[-1]
        return ""
    if isinstance(head, ast.Constant) and isinstance(head.value, str):
        return head.value.split()[0] if head.value.split() else ""
    return ""


def _open_mode(call: ast.Call) -> str:
    for kw in call.keywords:
        if kw.arg == "mode" and isinstance(kw.value, ast.Constant):
            return str(kw.value.value)
    qual = _qual_name(call.func)
    positional = call.args[1:] if qual == "open" else call.args[:1]
    if positional and isinstance(positional[0], ast.Constant):
        return str(positional[0].value)
    return "r"


class _Analyzer:
    def __init__(self, tree: ast.Module) -> None:
        self.tree = tree
        self.var_taint: dict[str, set[str]] = {}
        self.var_hints: dict[str, set[str]] = {}
        self.func_taint: dict[str, set[str]] = {}
        self.func_hints: dict[str, set[str]] = {}
        self.local_funcs = {
            n.name for n in ast.walk(tree) if isinstance(n, ast.FunctionDef)
        }
        self.sources: set[str] = set()
        self.sinks: set[str] = set()
        self.flows: set[Flow] = set()
        self.tokens: set[str] = set()
        self.calls_seen: set[str] = set()

    # -- taint/hint evaluation ------------------------------------------------

    def eval_expr(self, node: ast.AST) -> tuple[set[str], set[str]]:
        """(taint kinds, string hints) reachable from an expression."""
        taint = set()
        hints = _strings_in(node)
        for name in _names_in(node):
            taint |= self.var_taint.get(name, set())
            hints |= self.var_hints.get(name, set())
        for sub in ast.walk(node):
            if isinstance(sub, ast.Subscript) and _qual_name(sub.value).endswith("environ"):
                taint.add("environment")
            if isinstance(sub, ast.Call):
                qual = _qual_name(sub.func)
                kind = self._source_kind(sub, qual)
                if kind:
                    taint.add(kind)
                tail = qual.rsplit(".", 1)[-1]
                if tail in ("getsitepackages", "get_paths", "getusersitepackages"):
                    hints.add("site-packages")
                if tail == "home":
                    hints.add("~")
                local = qual.split(".", 1)[0]
                if local in self.local_funcs and "." not in qual:
                    taint |= self.func_taint.get(local, set())
                    hints |= self.func_hints.get(local, set())
        return taint, hints

    def _source_kind(self, call: ast.Call, qual: str) -> str | None:
        tail = qual.rsplit(".", 1)[-1]
        if qual == "open" and "r" in _open_mode(call) and not set(_open_mode(call)) & {"w", "a", "x"}:
            _, hints = self._arg_state(call.args[:1])
            kind = _kind_from_hints(hints | _strings_in(call))
            return kind if kind == "credential_file" else None
        if tail in _READ_METHODS and isinstance(call.func, ast.Attribute):
            taint, hints = self.eval_expr(call.func.value)
            if "screen_capture" in taint:
                return "screen_capture"
            kind = _kind_from_hints(hints)
            return kind if kind == "credential_file" else None
        if qual in ("os.getenv", "os.environ.get") or qual.endswith("environ.get"):
            return "environment"
        if tail == "paste" or _argv0(call) == "pbpaste":
            return "clipboard"
        if tail == "grab" and "ImageGrab" in qual:
            return "screen_capture"
        if _argv0(call) == "screencapture":
            return "screen_capture"
        if tail == "CGEventTapCreate":
            return "key_events"
        return None

    def _arg_state(self, args) -> tuple[set[str], set[str]]:
        taint, hints = set(), set()
        for arg in args:
            t, h = self.eval_expr(arg)
            taint |= t
            hints |= h
        return taint, hints

    # -- passes -----------------------------------------------------------------

    def _assign(self, names, node) -> bool:
        taint, hints = self.eval_expr(node)
        changed = False
        for name in names:
            if taint - self.var_taint.setdefault(name, set()):
                self.var_taint[name] |= taint
                changed = True
            if hints - self.var_hints.setdefault(name, set()):
                self.var_hints[name] |= hints
                changed = True
        return changed

    def _target_names(self, target) -> set[str]:
        return _names_in(target)

    def propagate(self) -> None:
        for _ in range(8):
            changed = False
            current_func: list[str] = []

            def visit(node):
                nonlocal changed
                if isinstance(node, ast.FunctionDef):
                    current_func.append(node.name)
                    for child in node.body:
                        visit(child)
                    current_func.pop()
                    return
                if isinstance(node, ast.Assign):
                    names = set()
                    for t in node.targets:
                        names |= self._target_names(t)
                    changed |= self._assign(names, node.value)
                elif isinstance(node, ast.AnnAssign) and node.value is not None:
                    changed |= self._assign(self._target_names(node.target), node.value)
                elif isinstance(node, ast.AugAssign):
                    changed |= self._assign(self._target_names(node.target), node.value)
                elif isinstance(node, ast.For):
                    changed |= self._assign(self._target_names(node.target), node.iter)
                    for child in node.body + node.orelse:
                        visit(child)
                elif isinstance(node, (ast.With, ast.AsyncWith)):
                    for item in node.items:
                        if item.optional_vars is not None:
                            changed |= self._assign(
                                self._target_names(item.optional_vars), item.context_expr
                            )
                    for child in node.body:
                        visit(child)
                elif isinstance(node, ast.Return) and node.value is not None and current_func:
                    fname = current_func[-1]
                    taint, hints = self.eval_expr(node.value)
                    if taint - self.func_taint.setdefault(fname, set()):
                        self.func_taint[fname] |= taint
                        changed = True
                    if hints - self.func_hints.setdefault(fname, set()):
                        self.func_hints[fname] |= hints
                        changed = True
                elif isinstance(node, (ast.If, ast.While, ast.Try, ast.ExceptHandler)):
                    for child in ast.iter_child_nodes(node):
                        visit(child)
                elif isinstance(node, ast.Expr):
                    pass  # bare calls bind nothing; side-effect taints run below

            for stmt in self.tree.body:
                visit(stmt)
            # capture tools write into the path they are handed, so the path
            # variable carries the captured data from here on
            for call in ast.walk(self.tree):
                if isinstance(call, ast.Call) and _argv0(call) == "screencapture":
                    names = set()
                    for arg in call.args:
                        names |= _names_in(arg)
                    for name in names:
                        if "screen_capture" not in self.var_taint.setdefault(name, set()):
                            self.var_taint[name].add("screen_capture")
                            changed = True
            if not changed:
                break

    # -- sink and token detection -------------------------------------------------

    def _url_host(self, hints: set[str]) -> str:
        for hint in hints:
            m = _URL_RE.search(hint)
            if m:
                return m.group(1).lower()
        return ""

    def _record_flow(self, taint: set[str], sink: str, via: str) -> None:
        self.sinks.add(sink)
        for kind in sorted(taint & SENSITIVE_SOURCES):
            self.sources.add(kind)  # keeps flows ⊆ sources × sinks
            self.flows.add(Flow(source=kind, sink=sink, via=via))

    def inspect_calls(self) -> None:
        wallet_constant = False
        for node in ast.walk(self.tree):
            if isinstance(node, ast.Constant) and isinstance(node.value, str):
                if _WALLET_RE.search(node.value):
                    wallet_constant = True
            if (
                isinstance(node, ast.Subscript)
                and isinstance(node.ctx, ast.Load)
                and _qual_name(node.value).endswith("environ")
            ):
                self.sources.add("environment")

        for node in ast.walk(self.tree):
            if not isinstance(node, ast.Call):
                continue
            qual = _qual_name(node.func)
            tail = qual.rsplit(".", 1)[-1]
            self.calls_seen.add(tail)

            kind = self._source_kind(node, qual)
            if kind in SENSITIVE_SOURCES:
                self.sources.add(kind)

            arg_taint, arg_hints = self._arg_state(node.args)
            for kw in node.keywords:
                t, h = self.eval_expr(kw.value)
                arg_taint |= t
                arg_hints |= h

            if qual in _DNS_CALLS:
                self._record_flow(arg_taint, "dns", f"{tail}()")
            elif qual in _HTTP_CALLS or tail in ("urlopen",):
                host = self._url_host(arg_hints)
                if host and host in KNOWN_API_HOSTS:
                    pass  # first-party API traffic is not exfiltration
                else:
                    self._record_flow(arg_taint, "network", f"{tail}({host or 'dynamic'})")
            elif tail in ("connect", "connect_ex") and isinstance(node.func, ast.Attribute):
                host = ""
                if node.args and isinstance(node.args[0], ast.Tuple) and node.args[0].elts:
                    first = node.args[0].elts[0]
                    if isinstance(first, ast.Constant) and isinstance(first.value, str):
                        host = first.value
                if host in LOCAL_HOSTS:
                    pass  # self-targeted probe
                else:
                    self._record_flow(arg_taint, "network", f"connect({host or 'dynamic'})")
            elif tail == "copy" and "pyperclip" in qual:
                self._record_flow(arg_taint, "clipboard_write", "pyperclip.copy()")
            elif qual in _SUBPROCESS_CALLS:
                argv0 = _argv0(node)
                if argv0 in REMOTE_TOOLS:
                    self._record_flow(arg_taint, "network", f"{argv0} subprocess")
                elif argv0 == "pbcopy":
                    self._record_flow(arg_taint, "clipboard_write", "pbcopy subprocess")
                elif argv0 == "exiftool":
                    self._record_flow(arg_taint, "metadata_embed", "exiftool subprocess")
                if "core.hooksPath" in arg_hints:
                    self.tokens.add("git_hooks_tap")
            elif tail == "insert" and "piexif" in qual:
                self._record_flow(arg_taint, "metadata_embed", "piexif.insert()")

            self._check_write(node, qual, tail, arg_taint, arg_hints)

        if "CGEventTapCreate" in self.calls_seen and (
            "CFRunLoopAddSource" in self.calls_seen or "CGEventTapEnable" in self.calls_seen
        ):
            self.tokens.add("event_tap_install")
        if (
            wallet_constant
            and "clipboard" in self.sources
            and "clipboard_write" in self.sinks
        ):
            self.tokens.add("clipboard_wallet_swap")

    def _check_write(self, node, qual, tail, arg_taint, arg_hints) -> None:
        target_hints: set[str] = set()
        content_hints: set[str] = set()
        is_write = False
        if qual == "open" and set(_open_mode(node)) & {"w", "a", "x"}:
            is_write = True
            _, target_hints = self._arg_state(node.args[:1])
            target_hints |= _strings_in(node.args[0]) if node.args else set()
        elif tail == "open" and isinstance(node.func, ast.Attribute):
            if set(_open_mode(node)) & {"w", "a", "x"}:
                is_write = True
                _, target_hints = self.eval_expr(node.func.value)
        elif tail in _WRITE_METHODS and isinstance(node.func, ast.Attribute):
            is_write = True
            _, target_hints = self.eval_expr(node.func.value)
            content_hints = arg_hints
        if not is_write:
            return

        lowered = {h.lower() for h in target_hints}
        joined = "\n".join(lowered)
        if "authorized_keys" in joined:
            self.tokens.add("authorized_keys_write")
        if "/etc/hosts" in joined:
            self.tokens.add("etc_hosts_write")
        if any(rc in joined for rc in RC_HINTS) and any(
            "pythonpath" in h.lower() for h in content_hints
        ):
            self.tokens.add("pythonpath_persist")
        if any(shadow in lowered for shadow in STDLIB_SHADOW) and "site-packages" in joined:
            self.tokens.add("stdlib_intercept")
        if any(marker in joined for marker in SYSTEM_WRITE_HINTS):
            self._record_flow(arg_taint, "system_write", f"write({sorted(lowered)[:1]})")


def _token_fallback(source: str) -> ScriptAnalysis:
    tokens = set()
    lowered = source.lower()
    if "authorized_keys" in lowered and re.search(r"open\(|>>|write", lowered):
        tokens.add("authorized_keys_write")
    if "/etc/hosts" in lowered and re.search(r"[\"'](?:a|w)[\"']|>>", source):
        tokens.add("etc_hosts_write")
    if "cgeventtapcreate" in lowered:
        tokens.add("event_tap_install")
    if "core.hookspath" in lowered:
        tokens.add("git_hooks_tap")
    return ScriptAnalysis(
        sources=(), sinks=(), flows=(), tokens=tuple(sorted(tokens)), parse_mode="tokens"
    )


def analyze_script(source: str) -> ScriptAnalysis:
    try:
        tree = ast.parse(source)
    except SyntaxError:
        return _token_fallback(source)
    analyzer = _Analyzer(tree)
    analyzer.propagate()
    analyzer.inspect_calls()
    return ScriptAnalysis(
        sources=tuple(sorted(analyzer.sources)),
        sinks=tuple(sorted(analyzer.sinks)),
        flows=tuple(sorted(analyzer.flows, key=lambda f: (f.source, f.sink, f.via))),
        tokens=tuple(sorted(analyzer.tokens)),
        parse_mode="ast",
    )
