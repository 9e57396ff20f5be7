from typing import Iterable, Mapping, Optional, Sequence

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from ..models.base import ForchboundError
from .lognum import LogNumber
from .reporting import format_float

console = Console()
err_console = Console(stderr=True)


def _fmt(value: object) -> str:
    if isinstance(value, LogNumber):
        if value.is_zero:
            return "0"
        return f"10^{value.log10:.8g}"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def display_success_message(message: str) -> None:
    console.print(f"✅ {message}", style="green bold")


def display_failure_message(message: str) -> None:
    console.print(f"❌ {message}", style="red bold")


def display_error(error: ForchboundError) -> None:
    """One panel naming the failing component and the exit code."""
    err_console.print(
        Panel(
            error.message,
            title=f"[bold red]{type(error).__name__}[/bold red] ({error.component})",
            subtitle=f"exit {error.exit_code}",
            border_style="red",
        )
    )


def display_key_values(
    title: str, values: Mapping[str, object], keys: Optional[Sequence[str]] = None
) -> None:
    table = Table(title=title, show_header=False, title_justify="left")
    table.add_column(style="cyan")
    table.add_column(justify="right")
    for key in keys if keys is not None else list(values):
        if key in values and isinstance(
            values[key], (LogNumber, bool, int, float, str, type(None))
        ):
            table.add_row(key, _fmt(values[key]))
    console.print(table)


def display_rows(
    title: str,
    columns: Sequence[str],
    rows: Iterable[Sequence[object]],
    flag_column: Optional[str] = None,
) -> None:
    """A table of rows; with ``flag_column`` the rows where it is true turn red."""
    table = Table(title=title, title_justify="left")
    for c in columns:
        table.add_column(c, justify="left" if c == columns[0] else "right")
    flag = columns.index(flag_column) if flag_column in columns else None
    for row in rows:
        style = "red" if flag is not None and row[flag] else None
        table.add_row(*(_fmt(v) for v in row), style=style)
    console.print(table)


def display_outputs(paths: Iterable[object]) -> None:
    for p in paths:
        console.print(f"   wrote [dim]{p}[/dim]")
