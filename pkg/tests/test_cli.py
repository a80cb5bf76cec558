import io
import subprocess
import sys

import pytest

from freemarkov.cli import run
from freemarkov.corpus import enumerate_diagrams
from freemarkov.markov import equivalent
from freemarkov.signature import Signature
from freemarkov.syntax import format_signature, print_term, read_term

AB = "letters: a b; gen f : a -> b; gen g : b -> a"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_eq_exit_codes():
    assert call("eq", "dup a ; (id(a) * disc a)", "id(a)")[0] == 0
    code, _, err = call("eq", "dup a", "id(a)")
    assert code == 1 and "cod words differ" in err
    code, _, err = call("eq", "dup a ; (", "id(a)")
    assert code == 2 and err.startswith("error:")


def test_check_and_normalize():
    code, out, _ = call("check", "--sig", AB, "gen f ; gen g")
    assert code == 0 and out == "ok: a -> a, 2 nodes\n"
    code, out, _ = call("normalize", "--sig", AB, "gen f ; disc b")
    assert code == 0 and out.strip() == "disc a"
    assert call("check", "--sig", AB, "gen f ; gen f")[0] == 2


def test_max_nodes_guard():
    code, _, err = call("--max-nodes", "1", "check", "dup a ; dup a * id(a)")
    assert code == 2 and "max-nodes" in err


def test_effect_on_a_chain():
    code, out, _ = call("effect", "--dag", "chain3", "--on", "v3")
    assert code == 0
    code, _, _ = call("eq", "--sig", "letters: v1 v2 v3; gen k_v1 : -> v1; "
                      "gen k_v2 : v1 -> v2; gen k_v3 : v2 -> v3",
                      out.strip(), "gen k_v1 ; gen k_v2 ; gen k_v3")
    assert code == 0


def test_intervene_and_refine():
    code, out, _ = call("intervene", "--dag", "chain2", "--at", "v2")
    assert code == 0 and "k_v2 = " in out
    code, out, _ = call("refine", "--dag-src", "chain2", "--dag-dst", "discrete1",
                        "--hom", "map v1 v1; map v2 v1", "--term", "dup v1")
    assert code == 0
    assert call("refine", "--dag-src", "chain2", "--dag-dst", "discrete1",
                "--hom", "map v1 v1", "--term", "dup v1")[0] == 2


def test_dot_output_and_files(tmp_path):
    code, out, _ = call("dot", "--sig", AB, "dup a ; (gen f * disc a)")
    assert code == 0 and out.startswith("digraph") and '"dup:a"' in out
    term = tmp_path / "t.term"
    term.write_text("gen f ; gen g")
    sig = tmp_path / "ab.sig"
    sig.write_text(AB.replace(";", "\n"))
    assert call("check", "--sig", str(sig), "@" + str(term))[0] == 0
    assert call("check", "--sig", str(sig), "@" + str(tmp_path / "missing"))[0] == 2


def test_usage_errors_exit_2():
    assert call()[0] == 2
    assert call("frobnicate")[0] == 2


def test_eq_agrees_with_the_library():
    sig = Signature.build("a b", {"f": ("a", "b"), "g": ("b", "a")})
    text = format_signature(sig)
    ds = [d for d in enumerate_diagrams(sig, 3) if d.dom == ("a",) and d.cod == ("a",)]
    for d1 in ds[:12]:
        for d2 in ds[:12]:
            code = call("eq", "--sig", text, print_term(d1), print_term(d2))[0]
            assert (code == 0) == equivalent(d1, d2)


def test_console_entry_point():
    p = subprocess.run([sys.executable, "-m", "freemarkov.cli", "eq", "id(a)", "id(a)"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout == "equivalent\n"
