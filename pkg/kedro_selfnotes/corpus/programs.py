"""Straight-line programs: integer (Algorithmic) and boolean variable tasks."""

import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from kedro_selfnotes.corpus.sample import NoteAnnotation, Sample
from kedro_selfnotes.errors import InvalidConfig, MalformedProgram, UndefinedVariable
from kedro_selfnotes.utils.hashing import derive_seed
from kedro_selfnotes.utils.typing import TokenLike

Value = Union[int, bool]
Env = Dict[str, Value]

VARIABLE_NAMES = tuple("abcdefghijklmnopqrstuvwxyz")
END = ";"
PRINT = "print"
BOOL_OPS = ("and", "or", "xor")
COMPARISONS = ("<", ">")


def format_value(value: Value) -> str:
    """Token for a value.

    Example:
        >>> format_value(True), format_value(-3)
        ('True', '-3')
    """
    if isinstance(value, bool):
        return "True" if value else "False"
    return str(value)


def parse_value(token: str) -> Value:
    """Inverse of :func:`format_value`.

    Example:
        >>> parse_value("False"), parse_value("12")
        (False, 12)
    """
    if token in ("True", "False"):
        return token == "True"
    try:
        return int(token)
    except ValueError:
        raise MalformedProgram(f"{token!r} is not a literal") from None


def _read(env: Env, name: str) -> Value:
    try:
        return env[name]
    except KeyError:
        raise UndefinedVariable(f"variable {name!r} read before assignment") from None


@dataclass(frozen=True)
class Assign:
    target: str
    value: Value

    def body(self) -> List[str]:
        return [self.target, "=", format_value(self.value)]

    def execute(self, env: Env) -> Optional[str]:
        env[self.target] = self.value
        return self.target

    @property
    def computed(self) -> bool:
        return False


@dataclass(frozen=True)
class Increment:
    target: str
    delta: int = 1

    def body(self) -> List[str]:
        return [self.target, "++" if self.delta > 0 else "--"]

    def execute(self, env: Env) -> Optional[str]:
        env[self.target] = _read(env, self.target) + self.delta
        return self.target

    @property
    def computed(self) -> bool:
        return True


@dataclass(frozen=True)
class Conditional:
    left: str
    op: str
    right: str
    then: Union[Assign, Increment, "Conditional"]

    def body(self) -> List[str]:
        return ["if", self.left, self.op, self.right, ":"] + self.then.body()

    def execute(self, env: Env) -> Optional[str]:
        left, right = _read(env, self.left), _read(env, self.right)
        fires = left < right if self.op == "<" else left > right
        return self.then.execute(env) if fires else None

    @property
    def computed(self) -> bool:
        return True


@dataclass(frozen=True)
class BoolOp:
    target: str
    op: str
    operands: Tuple[str, ...]

    def body(self) -> List[str]:
        if self.op == "not":
            return [self.target, "=", "not", self.operands[0]]
        return [self.target, "=", self.operands[0], self.op, self.operands[1]]

    def execute(self, env: Env) -> Optional[str]:
        values = [bool(_read(env, name)) for name in self.operands]
        if self.op == "not":
            result = not values[0]
        elif self.op == "and":
            result = values[0] and values[1]
        elif self.op == "or":
            result = values[0] or values[1]
        else:
            result = values[0] != values[1]
        env[self.target] = result
        return self.target

    @property
    def computed(self) -> bool:
        return True


Statement = Union[Assign, Increment, Conditional, BoolOp]


@dataclass(frozen=True)
class Program:
    statements: Tuple[Statement, ...]

    @property
    def variables(self) -> Tuple[str, ...]:
        names: List[str] = []
        for tokens in map(statement_tokens, self.statements):
            names.extend(t for t in tokens if t in VARIABLE_NAMES and t not in names)
        return tuple(names)

    def tokens(self) -> List[str]:
        return [tok for st in self.statements for tok in statement_tokens(st)]


def statement_tokens(statement: Statement) -> List[str]:
    return statement.body() + [END]


def parse_statement(words: List[str]) -> Statement:
    if not words:
        raise MalformedProgram("empty statement")
    if words[0] == "if":
        if len(words) < 6 or words[2] not in COMPARISONS or words[4] != ":":
            raise MalformedProgram(f"bad conditional: {' '.join(words)}")
        then = parse_statement(words[5:])
        if isinstance(then, BoolOp):
            raise MalformedProgram("conditionals guard integer statements only")
        return Conditional(words[1], words[2], words[3], then)
    if len(words) == 2 and words[1] in ("++", "--"):
        return Increment(words[0], 1 if words[1] == "++" else -1)
    if len(words) >= 3 and words[1] == "=":
        rest = words[2:]
        if len(rest) == 1:
            return Assign(words[0], parse_value(rest[0]))
        if len(rest) == 2 and rest[0] == "not":
            return BoolOp(words[0], "not", (rest[1],))
        if len(rest) == 3 and rest[1] in BOOL_OPS:
            return BoolOp(words[0], rest[1], (rest[0], rest[2]))
    raise MalformedProgram(f"unknown statement: {' '.join(words)}")


def parse_program(tokens: TokenLike) -> Program:
    """Parse ``;``-terminated statements.

    Example:
        >>> program = parse_program("e = 3 ; e ++ ; if i < e : e -- ;".split())
        >>> len(program.statements), program.variables
        (3, ('e', 'i'))
    """
    statements: List[Statement] = []
    current: List[str] = []
    for token in tokens:
        if token == END:
            statements.append(parse_statement(current))
            current = []
        else:
            current.append(token)
    if current:
        raise MalformedProgram(f"unterminated statement: {' '.join(current)}")
    return Program(tuple(statements))


def run_program(program: Program) -> Env:
    """Execute statements in order and return the final environment.

    Example:
        >>> run_program(parse_program(
        ...     "w = False ; v = True ; v = w xor v ; w = v and v ;".split()))
        {'w': True, 'v': True}
        >>> run_program(Program(()))
        {}
    """
    env: Env = {}
    for statement in program.statements:
        statement.execute(env)
    return env


def is_boolean(task: str) -> bool:
    return task == "boolean_var"


def note_tokens(task: str, variable: str, value: Value) -> List[str]:
    """``print v v = 4 ;`` for integers, ``print v True ;`` for booleans."""
    return [PRINT, variable] + answer_tokens(task, variable, value)


def question_tokens(variable: str) -> List[str]:
    return [PRINT, variable]


def answer_tokens(task: str, variable: str, value: Value) -> List[str]:
    if is_boolean(task):
        return [format_value(value), END]
    return [variable, "=", format_value(value), END]


class ProgramTracker:
    """Executes statements one at a time and reports due notes."""

    def __init__(self, task: str):
        self.task = task
        self.env: Env = {}

    def execute(self, statement: Statement) -> Optional[List[str]]:
        """Run one statement; return its note when the new value is computed."""
        target = statement.execute(self.env)
        if target is None or not statement.computed:
            return None
        return note_tokens(self.task, target, self.env[target])

    def answer(self, variable: str) -> List[str]:
        return answer_tokens(self.task, variable, _read(self.env, variable))

    def copy(self) -> "ProgramTracker":
        twin = ProgramTracker(self.task)
        twin.env = dict(self.env)
        return twin


def annotate_program(task: str, program: Program) -> Tuple[List[str], List[NoteAnnotation], Env]:
    """Context tokens, gold notes and final environment of a program."""
    tracker = ProgramTracker(task)
    context: List[str] = []
    notes: List[NoteAnnotation] = []
    for statement in program.statements:
        context.extend(statement_tokens(statement))
        note = tracker.execute(statement)
        if note is not None:
            notes.append(NoteAnnotation(len(context), tuple(note)))
    return context, notes, tracker.env


def make_program_sample(
    task: str, context: Union[Program, TokenLike], variable: str, seed: int = 0
) -> Sample:
    """Build a sample asking for ``variable`` at the end of a program.

    Example:
        >>> s = make_program_sample(
        ...     "algorithmic", "e = 3 ; e ++ ; i = 3 ; if i < e : e ++ ;".split(), "e")
        >>> " ".join(s.answer), [(n.pos, " ".join(n.tokens)) for n in s.notes]
        ('e = 5 ;', [(7, 'print e e = 4 ;'), (19, 'print e e = 5 ;')])
    """
    program = context if isinstance(context, Program) else parse_program(context)
    tokens, notes, env = annotate_program(task, program)
    return Sample(
        task=task,
        context=tuple(tokens),
        question=tuple(question_tokens(variable)),
        answer=tuple(answer_tokens(task, variable, _read(env, variable))),
        notes=tuple(notes),
        meta={"statements": len(program.statements)},
        seed=seed,
    )


@dataclass(frozen=True)
class AlgorithmicConfig:
    num_statements: int = 10
    num_variables: int = 3
    value_range: Tuple[int, int] = (0, 9)
    allow_nesting: bool = False


@dataclass(frozen=True)
class BooleanConfig:
    num_statements: int = 8
    num_variables: int = 4


def _simple_statement(
    rng: random.Random, live: Sequence[str], cfg: AlgorithmicConfig
) -> Union[Assign, Increment]:
    kind = rng.choice(("assign", "inc", "dec"))
    target = rng.choice(live)
    if kind == "assign":
        return Assign(target, rng.randint(*cfg.value_range))
    return Increment(target, 1 if kind == "inc" else -1)


def _integer_statement(
    rng: random.Random, names: Sequence[str], live: Sequence[str], cfg: AlgorithmicConfig
) -> Statement:
    if not live:
        return Assign(rng.choice(names), rng.randint(*cfg.value_range))
    kind = rng.choice(("assign", "inc", "dec", "cond"))
    if kind == "cond" and len(live) >= 2:
        left, right = rng.sample(list(live), 2)
        then: Union[Assign, Increment, Conditional] = _simple_statement(rng, live, cfg)
        if cfg.allow_nesting and rng.random() < 0.25:
            inner_left, inner_right = rng.sample(list(live), 2)
            then = Conditional(inner_left, rng.choice(COMPARISONS), inner_right, then)
        return Conditional(left, rng.choice(COMPARISONS), right, then)
    if kind == "assign":
        return Assign(rng.choice(names), rng.randint(*cfg.value_range))
    return Increment(rng.choice(live), -1 if kind == "dec" else 1)


def gen_algorithmic(cfg: AlgorithmicConfig, seed: int) -> Sample:
    """Random integer program of ``cfg.num_statements`` statements.

    Args:
        cfg (AlgorithmicConfig): program shape, at least two statements
        seed (int): generation seed

    Returns:
        Sample: the program, a query variable and its final value

    Raises:
        InvalidConfig: out-of-range statement or variable counts.
    """
    if not 1 <= cfg.num_variables <= len(VARIABLE_NAMES):
        raise InvalidConfig(
            f"num_variables must lie in [1, {len(VARIABLE_NAMES)}], got {cfg.num_variables}"
        )
    if cfg.num_statements < 2:
        raise InvalidConfig(f"num_statements must be at least 2, got {cfg.num_statements}")
    lo, hi = cfg.value_range
    if lo > hi:
        raise InvalidConfig(f"empty value range {cfg.value_range}")
    rng = random.Random(derive_seed("algorithmic", seed))
    names = rng.sample(VARIABLE_NAMES, cfg.num_variables)
    env: Env = {}
    statements: List[Statement] = []
    for _ in range(cfg.num_statements):
        statement = _integer_statement(rng, names, sorted(env), cfg)
        statement.execute(env)
        statements.append(statement)
    variable = rng.choice(sorted(env))
    return make_program_sample("algorithmic", Program(tuple(statements)), variable, seed)


def gen_boolean(cfg: BooleanConfig, seed: int) -> Sample:
    """Chain-like boolean program: two literals, then operators over defined names."""
    if cfg.num_statements < 2:
        raise InvalidConfig("boolean programs open with two literal assignments")
    if not 2 <= cfg.num_variables <= len(VARIABLE_NAMES):
        raise InvalidConfig(
            f"num_variables must lie in [2, {len(VARIABLE_NAMES)}], got {cfg.num_variables}"
        )
    rng = random.Random(derive_seed("boolean_var", seed))
    names = rng.sample(VARIABLE_NAMES, cfg.num_variables)
    statements: List[Statement] = [
        Assign(names[0], rng.random() < 0.5),
        Assign(names[1], rng.random() < 0.5),
    ]
    defined = {names[0], names[1]}
    for _ in range(cfg.num_statements - 2):
        live = sorted(defined)
        op = rng.choice(BOOL_OPS + ("not",))
        arity = 1 if op == "not" else 2
        operands = tuple(rng.choice(live) for _ in range(arity))
        target = rng.choice(names)
        statements.append(BoolOp(target, op, operands))
        defined.add(target)
    variable = rng.choice(sorted(defined))
    return make_program_sample("boolean_var", Program(tuple(statements)), variable, seed)
