from __future__ import annotations

from textual.app import ComposeResult
from textual.containers import Horizontal
from textual.reactive import reactive
from textual.widgets import Checkbox, ListItem, Static
from rich.text import Text

from .datamodels import RegionVerdict


class RegionCheckbox(Checkbox):
    def __init__(self, label: str, value: bool, region: str):
        super().__init__(label, value)
        self.region = region


# --- UI Widgets ---
class VerdictItem(ListItem):
    def __init__(self, verdict: RegionVerdict):
        super().__init__()
        self.verdict = verdict
        self.add_class(f"status-{verdict.status.value}")

    def compose(self) -> ComposeResult:
        margin = "" if self.verdict.margin is None else f"margin {self.verdict.margin:.3e}"
        with Horizontal(classes="verdict-container"):
            yield Static(self.verdict.region, classes="verdict-region")
            yield Static(self.verdict.status.value, classes="verdict-status")
            yield Static(("exact " if self.verdict.exact else "") + margin, classes="verdict-margin")


class FactItem(ListItem):
    """A labelled value in the classification or Cayley panes."""

    def __init__(self, label: str, value: str):
        super().__init__()
        self.label = label
        self.value = value

    def compose(self) -> ComposeResult:
        with Horizontal(classes="fact-container"):
            yield Static(self.label, classes="fact-label")
            yield Static(self.value, classes="fact-value")


class StatusBar(Static):
    loading_status = reactive("")
    keybinding_hint = reactive("")

    def on_mount(self) -> None:
        self.update_display()

    def set_keybindings(self, hint: str) -> None:
        """Set the keybinding hint text."""
        self.keybinding_hint = hint

    def update_display(self) -> None:
        status_items = []
        if self.loading_status:
            status_items.append(self.loading_status)
        if self.keybinding_hint:
            status_items.append(self.keybinding_hint)
        self.update(" | ".join(status_items))

    def watch_loading_status(self, loading_status: str) -> None:
        self.update_display()

    def watch_keybinding_hint(self, keybinding_hint: str) -> None:
        self.update_display()


class ErrorMessage(Static):
    def __init__(self, message: str):
        super().__init__(Text(message, style="bold"))
        self.styles.color = "$error"
