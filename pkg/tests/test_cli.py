import io

import pytest

from babel17.cli import EXIT_OK, EXIT_RUNTIME, EXIT_STATIC, build_parser, cmd_repl, main
from corpus import HELLO, ORDERED_SET_SECTION, ORDERED_SET_TEST_MODULE


def write(tmp_path, name, text):
    p = tmp_path / name
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text, encoding="utf-8")
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# run

def test_run_hello_world(tmp_path, capsys):
    write(tmp_path, "hello.b17", HELLO)
    main_file = write(tmp_path, "main.b17", "hello.world.x\n")
    code, out, _ = run(capsys, "run", str(tmp_path / "hello.b17"), main_file)
    assert (code, out) == (EXIT_OK, "2\n")


def test_run_uncaught_exception(tmp_path, capsys):
    code, out, err = run(capsys, "run", write(tmp_path, "d.b17", "1 div 0\n"))
    assert code == EXIT_RUNTIME and out == ""
    assert err.strip() == "uncaught exception: DomainError"


def test_run_empty_file(tmp_path, capsys):
    assert run(capsys, "run", write(tmp_path, "e.b17", "")) == (EXIT_OK, "()\n", "")


def test_run_parse_error_position(tmp_path, capsys):
    path = write(tmp_path, "s.b17", "val = 1\n")
    code, out, err = run(capsys, "run", path)
    assert code == EXIT_STATIC and out == ""
    assert err.startswith(f"{path}:1:5 ")


def test_run_scope_error_is_static(tmp_path, capsys):
    path = write(tmp_path, "s.b17", "val x = 1; val y = 3 * begin x = 2; x end; y\n")
    assert run(capsys, "run", path)[0] == EXIT_STATIC


def test_run_missing_file(tmp_path, capsys):
    code, _, err = run(capsys, "run", str(tmp_path / "nope.b17"))
    assert code == EXIT_STATIC and "no such file" in err


def test_run_directory_collects_recursively(tmp_path, capsys):
    write(tmp_path, "lib/a/hello.b17", HELLO)
    write(tmp_path, "lib/b/ignored.txt", "this is not babel")
    write(tmp_path, "lib/z.b17", "hello.world.x + 1\n")
    assert run(capsys, "run", str(tmp_path / "lib")) == (EXIT_OK, "3\n", "")


def test_run_stack_overflow_reported(tmp_path, capsys):
    path = write(tmp_path, "o.b17", "def f n = 1 + f (n + 1)\nf 0\n")
    code, _, err = run(capsys, "run", path)
    assert code == EXIT_RUNTIME and err.strip() == "uncaught exception: StackOverflow"


def test_workers_must_be_positive(tmp_path, capsys):
    path = write(tmp_path, "e.b17", "")
    assert run(capsys, "run", "--workers", "0", path)[0] == EXIT_STATIC


def test_seed_is_deterministic(tmp_path, capsys):
    path = write(tmp_path, "r.b17", "with [] : for i in 1 to 30 do yield random 1000 end\n")
    outs = {run(capsys, "run", "--seed", "7", path)[1] for _ in range(3)}
    assert len(outs) == 1
    other = {run(capsys, "run", "--seed", str(s), path)[1] for s in range(8, 12)}
    assert other - outs


def test_seed_with_workers(tmp_path, capsys):
    path = write(tmp_path, "r.b17", "[concurrent (random 1000), random 1000, choose {1, 2, 3}]\n")
    a = run(capsys, "run", "--seed", "3", "--workers", "8", path)
    b = run(capsys, "run", "--seed", "3", "--workers", "8", path)
    assert a[0] == EXIT_OK and a[1].startswith("[")
    assert b[0] == EXIT_OK


def test_pragmas_go_to_log_file(tmp_path, capsys):
    path = write(tmp_path, "p.b17", "#log 1 + 1\n#print [1]\n5\n")
    log = tmp_path / "out.log"
    assert run(capsys, "run", "--log", str(log), path) == (EXIT_OK, "5\n", "")
    assert log.read_text().splitlines() == [f"{path}:1:1 log: 2", f"{path}:2:1 print: [1]"]


def test_no_pragmas(tmp_path, capsys):
    path = write(tmp_path, "p.b17", "#log 1 + 1\n5\n")
    log = tmp_path / "out.log"
    assert run(capsys, "run", "--no-pragmas", "--log", str(log), path)[1] == "5\n"
    assert not log.exists() or log.read_text() == ""


# dumps

def test_dump_tokens(tmp_path, capsys):
    path = write(tmp_path, "t.b17", 'val x = "a"\n')
    code, out, _ = run(capsys, "check", "--dump-tokens", path)
    lines = out.splitlines()
    assert code == EXIT_OK
    assert lines[0].startswith("1:1 ") and lines[0].endswith(" val")
    assert any(ln.startswith("1:9 ") and ln.endswith('"a"') for ln in lines)
    assert any(ln.endswith("\\n") for ln in lines)
    assert all(len(ln.split(" ", 2)) == 3 for ln in lines)


def test_dump_ast_one_form_per_line(tmp_path, capsys):
    path = write(tmp_path, "a.b17", "module m\n  def x = 1\nend\nval y = 2\ny + 1\n")
    code, out, _ = run(capsys, "check", "--dump-ast", path)
    lines = out.splitlines()
    assert code == EXIT_OK and len(lines) == 3
    assert all(ln.startswith("(") and ln.count("(") == ln.count(")") for ln in lines)


def test_dump_headers_for_many_files(tmp_path, capsys):
    a = write(tmp_path, "a.b17", "1\n")
    b = write(tmp_path, "b.b17", "2\n")
    out = run(capsys, "check", "--dump-ast", a, b)[1]
    assert [ln for ln in out.splitlines() if ln.startswith("##")] == [f"## {a}", f"## {b}"]


# check

def test_check_does_not_evaluate(tmp_path, capsys):
    path = write(tmp_path, "c.b17", "#log 1\n1 div 0\n")
    log = tmp_path / "out.log"
    assert run(capsys, "check", "--log", str(log), path) == (EXIT_OK, "", "")
    assert not log.exists() or log.read_text() == ""


def test_check_reports_static_errors(tmp_path, capsys):
    path = write(tmp_path, "c.b17", "match (1, 1) case (x, x) => 1 end\n")
    code, _, err = run(capsys, "check", path)
    assert code == EXIT_STATIC and err.startswith(path + ":")


# test

@pytest.mark.parametrize("src", [ORDERED_SET_SECTION, ORDERED_SET_TEST_MODULE])
def test_test_command_ordered_set(tmp_path, capsys, src):
    path = write(tmp_path, "os.b17", src)
    code, out, _ = run(capsys, "test", path)
    assert code == EXIT_OK
    assert "total: 2 passed, 0 failed, 0 errors" in out


def test_test_command_failure_lists_position(tmp_path, capsys):
    path = write(tmp_path, "f.b17", "module m\nunittest\n#assert 1 == 1\n#assert 1 == 2\nend\n")
    code, out, _ = run(capsys, "test", path)
    assert code == EXIT_RUNTIME
    assert "total: 1 passed, 1 failed, 0 errors" in out
    fails = [ln for ln in out.splitlines() if ln.startswith("FAIL ")]
    assert len(fails) == 1 and fails[0].startswith(f"FAIL {path}:4:")


def test_test_command_error_counts(tmp_path, capsys):
    path = write(tmp_path, "f.b17", "module m.unittest\nval z = 1 div 0\nend\n")
    code, out, _ = run(capsys, "test", path)
    assert code == EXIT_RUNTIME
    assert "0 failed, 1 errors" in out


def test_production_mode_refuses_tests():
    from babel17 import Engine

    with Engine() as e:
        with pytest.raises(RuntimeError):
            e.run_tests()


# repl

def repl(text, *flags):
    out = io.StringIO()
    args = build_parser().parse_args(["repl", *flags])
    assert cmd_repl(args, io.StringIO(text), out) == EXIT_OK
    return out.getvalue().splitlines()


def test_repl_linear_scope_across_entries():
    assert repl("val x = 1\nx += 2\nx\n")[-1] == "3"


def test_repl_examples():
    assert repl("typeof 1.5\nnative Platform\n") == ["(: real)", "nil"]


def test_repl_multi_line_entry():
    assert repl("begin\n  val a = 4\n  a * a\nend\n") == ["16"]


def test_repl_errors_are_inline():
    got = repl("1 div 0\nval = 1\n\n7\n")
    assert got[0] == "uncaught exception: DomainError"
    assert "parse-error" in got[1]
    assert got[-1] == "7"


def test_repl_quit_stops_reading():
    assert repl("1\n:quit\n2\n") == ["1"]


def test_repl_load(tmp_path):
    path = write(tmp_path, "h.b17", HELLO + "hello.world.x\n")
    got = repl(f":load {path}\nhello.world.x + 1\n:load {tmp_path / 'missing.b17'}\n")
    assert got[:2] == ["2", "3"]
    assert got[2].startswith("cannot read")


def test_repl_is_quiet_when_piped():
    assert not any("b17>" in ln for ln in repl("1\n"))
