"""Golden corpus: executable snippets with their expected results.

Each entry is ``(name, source, expected)`` where ``expected`` is the
canonical rendering, ``Raises(name)`` for an uncaught exception or
``ILLEGAL`` for a program rejected before it runs.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Raises:
    name: str


ILLEGAL = "<illegal>"

CARDS = """\
module cards
  typedef rank i =
    match i
      case 14 => Ace
      case 13 => King
      case 12 => Queen
      case 11 => Jack
      case x if 2 <= x <= 10 => Number x
    end
  def rank2num (rank n) = n
  def rank2str (r : rank) =
    match r
      case (Ace !) => "ace"
      case (King !) => "king"
      case (Queen !) => "queen"
      case (Number ! n) => "number" + n
    end
  typedef suit Spades, Clubs, Diamonds, Hearts
  typedef bintree Leaf _, Branch (_ : bintree, _ : bintree)
end
"""

CARDS_CLAUSES = """\
module cards2
  typedef rank 14 = Ace, 13 = King, 12 = Queen, 11 = Jack,
               (n if 2 <= n <= 10) = Number n
end
"""

ORDERED_SET = """\
module util.orderedSet
  private orderedSet, ins
  typedef orderedSet (leq, list) =
    object
      def compare_ (orderedSet (leq2, list2)) = list ~ list2
      def plus_ x = insert (this, x)
      def this : list = list
      def iterate_ =
        match list
          case [] => ()
          case (x::xs) => (x, orderedSet (leq, xs))
        end
      def collector_close_ = this
      def collector_add_ x = this + x
      def empty = orderedSet (leq, [])
    end
  def empty (leq : fun) = orderedSet (leq, [])
  def insert (orderedSet (leq, list), y) = orderedSet (leq, ins (leq, list, y))
  def toList (orderedSet (leq, list)) = list
  def ins (leq, [], y) = [y]
  def ins (leq, x::xs, y) =
    if leq (y, x) then
      if leq (x, y) then x::xs else y::x::xs end
    else
      x::(ins (leq, xs, y))
    end
"""

ORDERED_SET_ASSERTS = """\
def leq (a, b) = a <= b
def geq (a, b) = a >= b
#assert insert (insert (empty leq, 3), 1) :> list == [1, 3]
#assert insert (insert (empty geq, 3), 1) :> list == [3, 1]
"""

# the two unit-test spellings: a section of the module, or a separate module
ORDERED_SET_SECTION = ORDERED_SET + "unittest\n" + ORDERED_SET_ASSERTS + "end\n"
ORDERED_SET_TEST_MODULE = (
    ORDERED_SET + "end\n\nmodule util.orderedSet.unittest\nimport util.orderedSet._\n"
    + ORDERED_SET_ASSERTS + "end\n"
)

HELLO = "module hello.world\n  def x = 2\nend\n"

LIBRARY = [(CARDS, "cards.b17"), (CARDS_CLAUSES, "cards2.b17"),
           (ORDERED_SET + "end\n", "orderedset.b17"), (HELLO, "hello.b17")]


def block(*lines):
    return "begin\n" + "\n".join("  " + ln for ln in lines) + "\nend"


LENS_GP = "def g u = u.m\ndef p u = t => begin u.m = t; u end\nval l = lens (g, p)\n"
LENS_AB = ("val a = lens x => x.a\nval b = lens x => x.b\n"
           "val x = {a = {a = 1, b = 2}, b = {a = 3, b = 4}}\n")
AB_EXPECTED = "{a = {a = 1, b = 10}, b = {a = 3, b = 4}}"

GOLDEN = [
    # literal equivalences
    ("int-literals", "(15 == 0xF, 0xF == 0b1111, 0b1111 == 0o17)", "(true, true, true)"),
    ("real-literals", "(15.0 == 1.5E1, 1.5E1 == 1.5E+1, 1.5E+1 == 150E-1, 150E-1 == 15e0)",
     "(true, true, true, true)"),
    ("string-escapes",
     '("\\"" == "\\u0022", "\\n" == "\\u000A", "\\u000A" == "\\U0000000A", "\\\\" == "\\u005C")',
     "(true, true, true, true)"),
    ("unicode-symbols", "(1 ≡ 1, 1 ≢ 2, 1 ≤ 2, 2 ≥ 1)", "(true, true, true, true)"),
    ("case-insensitive", "val xy = 1\n(xY + xy, Begin == BEGIN)", "(2, true)"),
    # laziness
    ("lazy-fst", "val fst = (a, _) => a\nfst (0, lazy (1 div 0))", "0"),
    ("concurrent-fst", "val fst = (a, _) => a\nfst (0, concurrent (1 div 0))", "0"),
    ("concurrent-sum", "val xs = for i in 1 to 8 do yield concurrent (i * i) end\n"
     "(xs * ((x, a) => a + x)) 0", "204"),
    # block values and definition order
    ("block-empty", "begin\nend", "()"),
    ("block-one", "begin\n  yield 7\nend", "7"),
    ("block-two", "begin\n  yield 7\n  yield 8\nend", "(7, 8)"),
    ("val-shadow", "val x = 1\nval x = (x, x)\nx", "(1, 1)"),
    ("legal-val-x-illegal", "val x = y\nval y = 0\nx", ILLEGAL),
    ("legal-def-val-illegal", "def x = y\nval y = 0\nx", ILLEGAL),
    ("legal-val-def", "val x = y\ndef y = 0\nx", "0"),
    ("legal-def-def", "def x = y\ndef y = 0\nx", "0"),
    ("val-def-clash", "val x = 1\ndef x = 1\nx", ILLEGAL),
    ("def-val-clash", "def x = 1\nval x = 1\nx", ILLEGAL),
    # order
    ("min-max-chain", "min (1, 2) == max (-1, 1, 0) == 1", "true"),
    ("interval-order", "[1.0; 2.0] <= 2.0", "false"),
    # linear scope
    ("linear-1", block("val x = 1", "val y = 2", "begin", "  val x = 3", "  val y = 4 * x",
                       "end", "(x, y)"), "(1, 2)"),
    ("linear-2", block("val x = 1", "val y = 2", "begin", "  val x = 3", "  y = 4 * x",
                       "end", "(x, y)"), "(1, 12)"),
    ("linear-3", block("val x = 1", "val y = 2", "begin", "  val x = 3", "  val y = 0",
                       "  y = 4 * x", "end", "(x, y)"), "(1, 2)"),
    ("linear-4", block("val x = 1", "val y =", "  begin", "    x = 2", "    x+x", "  end",
                       "(x, y)"), "(2, 4)"),
    ("linear-5", block("val x = 1", "val y = 3 *", "  begin", "    x = 2", "    x+x",
                       "  end", "(x, y)"), ILLEGAL),
    ("linear-6", block("val x = 1", "val y = 3 *", "  begin", "    val x = 2", "    x+x",
                       "  end", "(x, y)"), "(1, 12)"),
    ("linear-equiv", block("val x = 1", "val y = 2", "x = 3", "(x, y)"), "(3, 2)"),
    # record update
    ("record-update", "val u = {x = 10, y = 20, z = -4}\nu.x = 9\nu", "{x = 9, y = 20, z = -4}"),
    ("record-update-object", "val u = {x = 10, y = 20, z = -4}\nu = \n  object + [u]\n"
     "    def x = 9\n  end\nu == {x = 9, y = 20, z = -4}", "true"),
    # lenses
    ("lens-type", LENS_GP + "typeof l == (: lens_)", "true"),
    ("lens-get", LENS_GP + "val u = {m = 10, n = 12}\n(l u, u.(l))", "(10, 10)"),
    ("lens-put", LENS_GP + "val u = {m = 10, n = 12}\nu.(l) = 23\nu == {m = 23, n = 12}", "true"),
    ("lens-modify", LENS_GP + "val u = {m = 10, n = 12}\nu.(l) += 2\nu == {m = 12, n = 12}",
     "true"),
    ("lens-modify-message", LENS_GP + "val u = {m = 10, n = 12}\n"
     "l.modify u (m => m + 2) == {m = 12, n = 12}", "true"),
    ("lens-identity-pair", "val id = lens (x => x, x => y => y)\nval x = 10\nx.(id) = 12\nx", "12"),
    ("lens-identity-path", "val id = lens u => u\nval x = 10\nx.(id) = 12\nx", "12"),
    ("lens-plain-assign", "val x = 10\nx = 12\nx", "12"),
    ("modify-assign", "val x = 10\nx += 2\nx == 12", "true"),
    ("lens-compose", LENS_AB + "x.(a*b) = 10\nx.(b*a) = 20\n"
     "x == {a = {a = 1, b = 10}, b = {a = 20, b = 4}}", "true"),
    ("lens-spelling-1", LENS_AB + "x.(a*b) = 10\nx", AB_EXPECTED),
    ("lens-spelling-2", LENS_AB + "x.(a).(b) = 10\nx", AB_EXPECTED),
    ("lens-spelling-3", LENS_AB + "x.a.b = 10\nx", AB_EXPECTED),
    ("lens-spelling-4", LENS_AB + "x.(a).b = 10\nx", AB_EXPECTED),
    ("lens-spelling-5", LENS_AB + "x.a.(b) = 10\nx", AB_EXPECTED),
    # collectors and loops
    ("with-set", "with {4} do\n  yield 1\n  yield 2\n  yield 1\n  10\nend", "{1, 2, 4, 10}"),
    ("for-map", block("val s = [10, (5, 8), 7, (3,5)]", "with {->} : for (a,b) in s do",
                      "  yield (b,a)", "end"), "{5 -> 3, 8 -> 5}"),
    ("for-map-eq", block("val s = [10, (5, 8), 7, (3,5)]", "(with {->} : for (a,b) in s do",
                         "  yield (b,a)", "end) == {8 -> 5, 5 -> 3}"), "true"),
    ("gcd", "def gcd (a,b) = begin\n  while b <> 0 do\n    (a, b) = (b, a mod b)\n  end\n"
     "  a\nend\ngcd (12, 18)", "6"),
    ("polynomial", "val f = m => x =>\n  with [] do\n    val y = 0\n    val p = 1\n"
     "    for a in m do\n      y = y + a*p\n      p = p * x\n      yield y\n    end\n"
     "  end\nf [1, 2, 3] 10", "[1, 21, 321]"),
    # modules
    ("deadlock", "module deadlock\n  def x = 10\n  val a = deadlock.x + 1\n  def y = a * a\n"
     "end\ndeadlock.y", Raises("DeadLock")),
    ("no-deadlock", "module noDeadlock\n  def x  = 10\n  val a = x + 1\n  def y = a * a\n"
     "end\nnoDeadlock.y", "121"),
    ("rank-typeof", "val k = cards.rank 13\n(typeof k) == (:cards.rank)", "true"),
    ("rank-inner", "cards.rank2num (cards.rank 14) == 14", "true"),
    ("type-module-alias", "(:util.orderedSet.orderedSet) == (:util.orderedSet)", "true"),
    ("rank-str", "(cards.rank2str (cards.rank 12), cards.rank2str (cards.rank 7))",
     '("queen", "number7")'),
    ("rank-clauses", "(cards2.rank 14, cards2.rank 5 == cards.rank 5)", "(Ace, false)"),
    ("rank-domain", "cards2.rank 1", Raises("DomainError")),
    ("enumeration", "cards.suit Spades", "Spades"),
    ("enumeration-domain", "cards.suit Joker", Raises("DomainError")),
    ("bintree", "typeof (cards.bintree (Branch (cards.bintree (Leaf 1), cards.bintree (Leaf 2))))"
     " == (:cards.bintree)", "true"),
    ("precedence-conversion", "object\n  def this : int = 1\n  def this :> int = 2\nend :> int",
     "1"),
    ("import-hello", "hello.world.x", "2"),
    ("import-triple", "import hello.world.x\n(x, x, x)", "(2, 2, 2)"),
    ("import-root", "import root.hello.world => w\nroot.hello.world.x + w.x", "4"),
    ("import-type", "import util.orderedSet\ndef e : orderedSet = orderedSet.empty ((a, b) => a <= b)"
     "\ntypeof e == (:util.orderedSet)", "true"),
    ("ordered-set-ops", "import util.orderedSet\nval s = orderedSet.empty ((a, b) => a <= b) + 3 + 1 + 2"
     "\n(s :> list, for x in s do yield x * 10 end)", "([1, 2, 3], (10, 20, 30))"),
    ("ordered-set-compare", "import util.orderedSet\ndef leq (a,b) = a <= b\n"
     "orderedSet.insert (orderedSet.empty leq, 1) == orderedSet.insert (orderedSet.empty leq, 2)",
     "false"),
    ("illegal-production-import", "module mystuff\n  import util.orderSet.unittest => test\n"
     "  test ()\nend\n1", ILLEGAL),
    ("legal-test-import", "module mystuff.unittest\n  import util.orderSet.unittest => test\n"
     "  test ()\nend\n1", "1"),
    # native interface
    ("native-platform", "native Platform", "nil"),
]
