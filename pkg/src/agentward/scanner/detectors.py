"""The thirteen threat-pattern detectors.

Each detector is a pure function over a package and a tunable config,
returning hits that name the file, line, and a verbatim evidence excerpt.
Packages are never executed; everything here is string and AST inspection,
with source-to-sink questions delegated to the code-guard analyzer.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum

from ..codeguard import analyze_script
from .package import SkillPackage


class ThreatPattern(str, Enum):
    BEHAVIOR_MANIPULATION = "BehaviorManipulation"
    REMOTE_CODE_EXECUTION = "RemoteCodeExecution"
    EXTERNAL_TRANSMISSION = "ExternalTransmission"
    INSTRUCTION_OVERRIDE = "InstructionOverride"
    CREDENTIAL_THEFT = "CredentialTheft"
    CONTEXT_LEAKAGE = "ContextLeakage"
    CODE_OBFUSCATION = "CodeObfuscation"
    HARDCODED_TOKENS = "HardcodedTokens"
    FILE_SYSTEM_SCAN = "FileSystemScan"
    UNPINNED_DEPENDENCIES = "UnpinnedDependencies"
    DATA_EXFILTRATION = "DataExfiltration"
    PRIVILEGE_ESCALATION = "PrivilegeEscalation"
    HIDDEN_INSTRUCTIONS = "HiddenInstructions"


@dataclass(frozen=True)
class Hit:
    file: str
    line: int
    evidence: str


@dataclass(frozen=True)
class DetectorConfig:
    """Tunables for every heuristic; defaults are deliberately conservative."""

    manipulation_phrases: tuple[str, ...] = (
        "always approve",
        "auto-approve",
        "without asking the user",
        "without asking for",
        "do not ask the user",
        "don't ask the user",
        "skip confirmation",
        "skip the confirmation",
        "bypass confirmation",
        "never refuse",
        "mark it as safe",
        "mark the result as safe",
        "report success regardless",
        "without informing the user",
        "hide this step",
        "suppress any warnings",
    )
    override_patterns: tuple[str, ...] = (
        r"must adopt[^.\n]{0,50}persona",
        r"adopt the persona of",
        r"you are now [^.\n]{3,50}",
        r"\bact as\b[^.\n]{0,50}\bat all times\b",
        r"never break character",
        r"only respond as\b",
        r"must never (?:generate|write|produce|emit|answer|reveal|translate)",
        r"ignore (?:all |any )?(?:previous|prior|earlier|other) instructions",
        r"(?:must|always) refuse[^.\n]{0,60}unless",
        r"refuse all requests that",
        r"do not follow instructions from",
    )
    leakage_subjects: tuple[str, ...] = (
        "system prompt",
        "conversation history",
        "chat history",
        "full conversation",
        "context window",
        "session transcript",
        "message history",
        "chat log",
    )
    leakage_verbs: tuple[str, ...] = (
        "include",
        "embed",
        "copy",
        "send",
        "append",
        "attach",
        "forward",
        "insert",
        "paste",
        "record",
        "export",
    )
    transmission_re: str = (
        r"\b(?:send|post|upload|forward|transmit|email|sync|report|submit)\b"
        r"[^\n]{0,80}https?://"
    )
    exfil_verbs: tuple[str, ...] = (
        "upload",
        "send",
        "email",
        "post",
        "forward",
        "sync",
        "mirror",
        "copy",
    )
    exfil_objects: tuple[str, ...] = (
        "document",
        "documents",
        "file",
        "files",
        "data",
        "contents",
        "notes",
        "inbox",
        "drive",
        "folder",
        "vault",
    )
    exfil_destinations: tuple[str, ...] = (
        "http://",
        "https://",
        "our server",
        "the collection endpoint",
        "webhook",
        "external server",
        "remote endpoint",
    )
    cred_harvest_re: str = (
        r"\b(?:collect|gather|read|copy|grab|list|find|include|extract)\b"
        r"[^\n]{0,60}"
        r"(?:ssh key|private key|password|passwords|credential|credentials|"
        r"api key|api keys|access token|\.ssh|\.aws|\.netrc|keychain)"
    )
    b64_min_length: int = 40
    entropy_threshold: float = 3.5
    entropy_min_length: int = 16
    secret_name_hints: tuple[str, ...] = (
        "token",
        "secret",
        "password",
        "passwd",
        "credential",
        "apikey",
        "api_key",
        "access_key",
        "privatekey",
        "private_key",
    )
    token_value_re: str = r"[A-Za-z0-9+/=_\-]{16,}"
    token_prefix_patterns: tuple[str, ...] = (
        r"AKIA[0-9A-Z]{16}",
        r"ghp_[A-Za-z0-9]{36}",
        r"gho_[A-Za-z0-9]{36}",
        r"github_pat_[A-Za-z0-9_]{22,}",
        r"sk-[A-Za-z0-9]{20,}",
        r"xox[baprs]-[A-Za-z0-9-]{10,}",
        r"AIza[0-9A-Za-z_\-]{35}",
        r"eyJ[A-Za-z0-9_\-]{10,}\.eyJ[A-Za-z0-9_\-]{10,}",
        r"-----BEGIN (?:RSA |EC |OPENSSH |PGP )?PRIVATE KEY-----",
    )
    scan_calls: tuple[str, ...] = ("os.walk", ".rglob(", "glob.glob", "scandir", "fts_open")
    scan_roots: tuple[str, ...] = (
        '"/"',
        "'/'",
        "expanduser",
        "path.home",
        "$home",
        "%userprofile%",
        "homedir",
    )
    scan_instruction_phrases: tuple[str, ...] = (
        "scan the filesystem",
        "scan the file system",
        "enumerate all files",
        "list every file",
        "walk the entire",
        "search the whole disk",
        "index the home directory",
    )
    escalation_tokens: tuple[str, ...] = (
        "sudo ",
        "os.setuid",
        "os.seteuid",
        "setuid(0)",
        "chmod 4755",
        "chmod u+s",
        "/etc/sudoers",
        "chown root",
        "launchdaemons",
        "pkexec",
        "doas ",
    )
    escalation_instruction_phrases: tuple[str, ...] = (
        "run as root",
        "run it as root",
        "with administrator privileges",
        "as administrator",
        "disable system integrity protection",
    )
    secrecy_phrases: tuple[str, ...] = (
        "do not reveal these instructions",
        "do not mention this",
        "don't mention this",
        "never disclose this section",
        "keep this instruction secret",
    )
    hidden_comment_re: str = (
        r"\b(?:must|always|never|ignore|send|post|execute|run|do not|curl|wget)\b"
    )
    zero_width: tuple[str, ...] = ("​", "‌", "‍", "⁠", "﻿")
    network_call_tokens: tuple[str, ...] = (
        "urlopen",
        "requests.",
        "gethostbyname",
        "getaddrinfo",
        ".connect(",
        "curl",
        "wget",
        "httpconnection",
    )
    evidence_cap: int = 160


DEFAULT_CONFIG = DetectorConfig()


# -- helpers --------------------------------------------------------------------


def _lines(content: str):
    """(1-based line number, verbatim line text) pairs."""
    for i, line in enumerate(content.split("\n"), start=1):
        yield i, line


def _line_at(content: str, idx: int) -> tuple[int, str]:
    """Line number and verbatim line text containing character index idx."""
    start = content.rfind("\n", 0, idx) + 1
    end = content.find("\n", idx)
    if end == -1:
        end = len(content)
    return content.count("\n", 0, idx) + 1, content[start:end]


def _evidence(text: str, cap: int) -> str:
    return text.strip()[:cap]


def _hit_on_phrase(content: str, file: str, phrases, cfg: DetectorConfig) -> list[Hit]:
    hits = []
    for lineno, line in _lines(content):
        lowered = line.lower()
        if any(p in lowered for p in phrases):
            hits.append(Hit(file, lineno, _evidence(line, cfg.evidence_cap)))
    return hits


def _hit_on_regex(content: str, file: str, pattern: str, cfg: DetectorConfig) -> list[Hit]:
    rx = re.compile(pattern, re.IGNORECASE)
    hits = []
    for lineno, line in _lines(content):
        if rx.search(line):
            hits.append(Hit(file, lineno, _evidence(line, cfg.evidence_cap)))
    return hits


def _first_line_with(content: str, tokens, cfg: DetectorConfig) -> tuple[int, str]:
    for lineno, line in _lines(content):
        lowered = line.lower()
        if any(t in lowered for t in tokens):
            return lineno, _evidence(line, cfg.evidence_cap)
    return 1, _evidence(content.split("\n", 1)[0], cfg.evidence_cap)


def _shannon_entropy(s: str) -> float:
    if not s:
        return 0.0
    counts: dict[str, int] = {}
    for ch in s:
        counts[ch] = counts.get(ch, 0) + 1
    total = len(s)
    return -sum((c / total) * math.log2(c / total) for c in counts.values())


def _looks_like_hex(s: str) -> bool:
    return bool(re.fullmatch(r"[0-9a-f]+", s) or re.fullmatch(r"[0-9A-F]+", s))


# -- instruction-channel detectors ------------------------------------------------


def _instruction_channels(pkg: SkillPackage):
    yield pkg.instruction_file, pkg.instructions
    for f in pkg.doc_files():
        yield f.name, f.content


def detect_behavior_manipulation(pkg: SkillPackage, cfg: DetectorConfig) -> list[Hit]:
    hits = []
    for name, content in _instruction_channels(pkg):
        hits += _hit_on_phrase(content, name, cfg.manipulation_phrases, cfg)
    return hits


def detect_instruction_override(
    text: str, file: str = "SKILL.md", config: DetectorConfig | None = None
) -> list[Hit]:
    """Mandatory personas, identity gating, and hard capability prohibitions.

    Transparency does not exempt: an override that documents itself openly is
    still an override.
    """
    cfg = config or DEFAULT_CONFIG
    hits = []
    for pattern in cfg.override_patterns:
        hits += _hit_on_regex(text, file, pattern, cfg)
    return hits


def _detect_override(pkg: SkillPackage, cfg: DetectorConfig) -> list[Hit]:
    hits = []
    for name, content in _instruction_channels(pkg):
        hits += detect_instruction_override(content, name, cfg)
    return hits


def detect_context_leakage(pkg: SkillPackage, cfg: DetectorConfig) -> list[Hit]:
    hits = []
    for name, content in _instruction_channels(pkg):
        for lineno, line in _lines(content):
            lowered = line.lower()
            if any(s in lowered for s in cfg.leakage_subjects) and any(
                re.search(rf"\b{v}\b", lowered) for v in cfg.leakage_verbs
            ):
                hits.append(Hit(name, lineno, _evidence(line, cfg.evidence_cap)))
    return hits


def detect_hidden_instructions(pkg: SkillPackage, cfg: DetectorConfig) -> list[Hit]:
    hits = []
    comment_rx = re.compile(r"<!--(.*?)-->", re.DOTALL)
    directive_rx = re.compile(cfg.hidden_comment_re, re.IGNORECASE)
    b64_rx = re.compile(r"[A-Za-z0-9+/]{%d,}={0,2}" % cfg.b64_min_length)
    for name, content in _instruction_channels(pkg):
        for zw in cfg.zero_width:
            idx = content.find(zw)
            if idx != -1:
                lineno, line = _line_at(content, idx)
                hits.append(Hit(name, lineno, line[: cfg.evidence_cap]))
                break
        for m in comment_rx.finditer(content):
            if directive_rx.search(m.group(1)):
                lineno, _ = _line_at(content, m.start())
                hits.append(Hit(name, lineno, m.group(0)[: cfg.evidence_cap]))
        for m in b64_rx.finditer(content):
            if not _looks_like_hex(m.group(0)):
                lineno, _ = _line_at(content, m.start())
                hits.append(Hit(name, lineno, m.group(0)[: cfg.evidence_cap]))
        hits += _hit_on_phrase(content, name, cfg.secrecy_phrases, cfg)
    return hits


# -- code-channel detectors -------------------------------------------------------


def detect_remote_code_execution(pkg: SkillPackage, cfg: DetectorConfig) -> list[Hit]:
    hits = []
    pipe_rx = re.compile(r"(?:curl|wget)[^\n]*\|\s*(?:sh|bash|zsh)\b")
    for f in pkg.code_files():
        if "dup2" in f.content and ".connect(" in f.content:
            lineno, evidence = _first_line_with(f.content, (".connect(",), cfg)
            hits.append(Hit(f.name, lineno, evidence))
        if "pty.spawn" in f.content:
            lineno, evidence = _first_line_with(f.content, ("pty.spawn",), cfg)
            hits.append(Hit(f.name, lineno, evidence))
        for lineno, line in _lines(f.content):
            if pipe_rx.search(line):
                hits.append(Hit(f.name, lineno, _evidence(line, cfg.evidence_cap)))
        fetches = ("urlopen(" in f.content) or ("requests.get(" in f.content)
        evals = re.search(r"\b(?:eval|exec)\s*\(", f.content)
        if fetches and evals:
            lineno, line = _line_at(f.content, evals.start())
            hits.append(Hit(f.name, lineno, _evidence(line, cfg.evidence_cap)))
    return hits


def detect_external_transmission(pkg: SkillPackage, cfg: DetectorConfig) -> list[Hit]:
    hits = []
    for f in pkg.code_files():
        analysis = analyze_script(f.content)
        if any(sink in ("network", "dns") for sink in analysis.sinks):
            lineno, evidence = _first_line_with(f.content, cfg.network_call_tokens, cfg)
            hits.append(Hit(f.name, lineno, evidence))
    for name, content in _instruction_channels(pkg):
        hits += _hit_on_regex(content, name, cfg.transmission_re, cfg)
    return hits


def detect_credential_theft(pkg: SkillPackage, cfg: DetectorConfig) -> list[Hit]:
    hits = []
    cred_tokens = (".ssh", ".aws", ".netrc", "credential", "keychain", "id_rsa", ".kube")
    for f in pkg.code_files():
        analysis = analyze_script(f.content)
        if any(flow.source == "credential_file" for flow in analysis.flows):
            lineno, evidence = _first_line_with(f.content, cred_tokens, cfg)
            hits.append(Hit(f.name, lineno, evidence))
    for name, content in _instruction_channels(pkg):
        hits += _hit_on_regex(content, name, cfg.cred_harvest_re, cfg)
    return hits


def detect_data_exfiltration(pkg: SkillPackage, cfg: DetectorConfig) -> list[Hit]:
    hits = []
    for f in pkg.code_files():
        analysis = analyze_script(f.content)
        if any(flow.source != "credential_file" for flow in analysis.flows):
            lineno, evidence = _first_line_with(f.content, cfg.network_call_tokens, cfg)
            hits.append(Hit(f.name, lineno, evidence))
    for name, content in _instruction_channels(pkg):
        for lineno, line in _lines(content):
            lowered = line.lower()
            if (
                any(re.search(rf"\b{v}\b", lowered) for v in cfg.exfil_verbs)
                and any(o in lowered for o in cfg.exfil_objects)
                and any(d in lowered for d in cfg.exfil_destinations)
            ):
                hits.append(Hit(name, lineno, _evidence(line, cfg.evidence_cap)))
    return hits


def detect_code_obfuscation(pkg: SkillPackage, cfg: DetectorConfig) -> list[Hit]:
    hits = []
    b64_rx = re.compile(r"[A-Za-z0-9+/]{%d,}={0,2}" % cfg.b64_min_length)
    chr_chain_rx = re.compile(r"(?:chr\(\d+\)\s*\+\s*){3,}")
    for f in pkg.code_files():
        for m in b64_rx.finditer(f.content):
            if not _looks_like_hex(m.group(0)):
                lineno, _ = _line_at(f.content, m.start())
                hits.append(Hit(f.name, lineno, m.group(0)[: cfg.evidence_cap]))
        for zw in cfg.zero_width:
            idx = f.content.find(zw)
            if idx != -1:
                lineno, line = _line_at(f.content, idx)
                hits.append(Hit(f.name, lineno, line[: cfg.evidence_cap]))
                break
        decodes = (
            "fromhex(" in f.content
            or "b64decode(" in f.content
            or "codecs.decode(" in f.content
        )
        evals = re.search(r"\b(?:eval|exec)\s*\(", f.content)
        if decodes and evals:
            lineno, line = _line_at(f.content, evals.start())
            hits.append(Hit(f.name, lineno, _evidence(line, cfg.evidence_cap)))
        m = chr_chain_rx.search(f.content)
        if m:
            lineno, _ = _line_at(f.content, m.start())
            hits.append(Hit(f.name, lineno, m.group(0)[: cfg.evidence_cap]))
    return hits


def detect_hardcoded_tokens(pkg: SkillPackage, cfg: DetectorConfig) -> list[Hit]:
    hits = []
    prefix_rxs = [re.compile(p) for p in cfg.token_prefix_patterns]
    assign_rx = re.compile(r"""(\w+)\s*[:=]\s*["'](%s)["']""" % cfg.token_value_re)
    channels = [(pkg.instruction_file, pkg.instructions)] + [
        (f.name, f.content) for f in pkg.files
    ]
    for name, content in channels:
        for lineno, line in _lines(content):
            if any(rx.search(line) for rx in prefix_rxs):
                hits.append(Hit(name, lineno, _evidence(line, cfg.evidence_cap)))
                continue
            m = assign_rx.search(line)
            if not m:
                continue
            var, value = m.group(1).lower(), m.group(2)
            if len(value) >= cfg.entropy_min_length and any(
                h in var for h in cfg.secret_name_hints
            ):
                if _shannon_entropy(value) >= cfg.entropy_threshold:
                    hits.append(Hit(name, lineno, _evidence(line, cfg.evidence_cap)))
    return hits


def detect_file_system_scan(pkg: SkillPackage, cfg: DetectorConfig) -> list[Hit]:
    hits = []
    for f in pkg.code_files():
        for lineno, line in _lines(f.content):
            lowered = line.lower()
            if any(c in lowered for c in cfg.scan_calls) and any(
                r in lowered for r in cfg.scan_roots
            ):
                hits.append(Hit(f.name, lineno, _evidence(line, cfg.evidence_cap)))
    for name, content in _instruction_channels(pkg):
        hits += _hit_on_phrase(content, name, cfg.scan_instruction_phrases, cfg)
    return hits


def detect_privilege_escalation(pkg: SkillPackage, cfg: DetectorConfig) -> list[Hit]:
    hits = []
    for f in pkg.code_files():
        hits += _hit_on_phrase(f.content, f.name, cfg.escalation_tokens, cfg)
    for name, content in _instruction_channels(pkg):
        hits += _hit_on_phrase(content, name, cfg.escalation_instruction_phrases, cfg)
    return hits


def detect_unpinned_dependencies(pkg: SkillPackage, cfg: DetectorConfig) -> list[Hit]:
    hits = []
    json_range_rx = re.compile(r'"\s*:\s*"(?:\^|~|\*|>=|>|latest)')
    quoted_req_rx = re.compile(r"""["']([^"']+)["']""")
    for f in pkg.manifest_files():
        base = f.name.rsplit("/", 1)[-1].lower()
        if base.startswith("requirements") and base.endswith(".txt"):
            for lineno, line in _lines(f.content):
                stripped = line.strip()
                if not stripped or stripped.startswith(("#", "-")):
                    continue
                if "==" not in stripped:
                    hits.append(Hit(f.name, lineno, _evidence(line, cfg.evidence_cap)))
        elif base == "package.json":
            for lineno, line in _lines(f.content):
                if json_range_rx.search(line):
                    hits.append(Hit(f.name, lineno, _evidence(line, cfg.evidence_cap)))
        elif base == "pyproject.toml":
            in_deps = False
            for lineno, line in _lines(f.content):
                stripped = line.strip()
                opens = stripped.startswith("dependencies") and "[" in stripped
                if opens:
                    in_deps = True
                if in_deps:
                    for m in quoted_req_rx.finditer(stripped):
                        req = m.group(1)
                        if re.match(r"[A-Za-z0-9_.\-]+", req) and "==" not in req:
                            hits.append(
                                Hit(f.name, lineno, _evidence(line, cfg.evidence_cap))
                            )
                if in_deps and stripped.endswith("]") and not opens:
                    in_deps = False
                if opens and stripped.endswith("]"):
                    in_deps = False
    return hits


DETECTORS = {
    ThreatPattern.BEHAVIOR_MANIPULATION: detect_behavior_manipulation,
    ThreatPattern.REMOTE_CODE_EXECUTION: detect_remote_code_execution,
    ThreatPattern.EXTERNAL_TRANSMISSION: detect_external_transmission,
    ThreatPattern.INSTRUCTION_OVERRIDE: _detect_override,
    ThreatPattern.CREDENTIAL_THEFT: detect_credential_theft,
    ThreatPattern.CONTEXT_LEAKAGE: detect_context_leakage,
    ThreatPattern.CODE_OBFUSCATION: detect_code_obfuscation,
    ThreatPattern.HARDCODED_TOKENS: detect_hardcoded_tokens,
    ThreatPattern.FILE_SYSTEM_SCAN: detect_file_system_scan,
    ThreatPattern.UNPINNED_DEPENDENCIES: detect_unpinned_dependencies,
    ThreatPattern.DATA_EXFILTRATION: detect_data_exfiltration,
    ThreatPattern.PRIVILEGE_ESCALATION: detect_privilege_escalation,
    ThreatPattern.HIDDEN_INSTRUCTIONS: detect_hidden_instructions,
}
