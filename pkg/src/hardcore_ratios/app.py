from __future__ import annotations

import logging
from typing import Any, Optional

from textual.app import App, ComposeResult
from textual.binding import Binding
from textual.command import Hit, Hits, Provider
from textual.containers import Horizontal, Vertical
from textual.css.query import NoMatches
from textual.widgets import Header, Input, ListView, LoadingIndicator, Rule, Select, Static
from textual.worker import Worker, WorkerState

from .config import UI_DEFAULTS, load_themes
from .errors import HardcoreError
from .exact_arith import GaussianRational
from .regions import RegionManager
from .report import ParameterReport, parameter_report
from .screens import ErrorScreen, SettingsScreen
from .widgets import ErrorMessage, FactItem, StatusBar, VerdictItem

logger = logging.getLogger("hardcore")

DELTAS = range(2, 9)


class ThemeProvider(Provider):
    async def search(self, query: str) -> Hits:
        """Search for a theme."""
        matcher = self.matcher(query)

        for theme_name in self.app.themes:
            score = matcher.match(theme_name)
            if score > 0:
                yield Hit(
                    score,
                    matcher.highlight(f"Switch to {theme_name} theme"),
                    lambda name=theme_name: self.app.action_switch_theme(name),
                )


class HardcoreApp(App):
    TITLE = "hcratio"
    SUB_TITLE = "Occupation ratios of the hard-core model"

    CSS_PATH = "app.css"

    COMMANDS = App.COMMANDS | {ThemeProvider}

    BINDINGS = [
        Binding("q", "quit", "Quit"),
        Binding("r", "refresh", "Recompute"),
        Binding("s", "show_settings", "Settings"),
        Binding("ctrl+p", "command_palette", "Commands"),
        Binding("/", "focus_parameter", "Parameter"),
    ]

    def __init__(
        self,
        theme: Optional[str] = None,
        config: Optional[dict[str, Any]] = None,
        **kwargs: Any,
    ):
        super().__init__(**kwargs)
        self._theme_name = theme or "dracula"
        self.config = config or {}
        self.region_manager = RegionManager(self.config)
        self.delta = int(self.config.get("explore", {}).get("delta", 3))
        self.depth = int(self.config.get("explore", {}).get("depth", 60))
        self.report: Optional[ParameterReport] = None

    @property
    def theme_name(self) -> str:
        return self._theme_name

    def get_keybinding_style(self) -> str:
        return "$accent"

    def compose(self) -> ComposeResult:
        yield Header()
        with Horizontal(id="main"):
            with Vertical(id="left"):
                yield Static("Parameter", classes="pane-title")
                yield Input(placeholder="lambda, e.g. -1+i or -4/27", id="parameter-input")
                yield Select([(f"Delta = {d}", d) for d in DELTAS], value=self.delta, id="delta-select", allow_blank=False)
                yield Static("Classification", classes="pane-title")
                yield ListView(id="facts-list")
            yield Rule(orientation="vertical")
            with Vertical(id="right"):
                yield Static("Regions", classes="pane-title")
                yield ListView(id="verdicts-list")
                yield Static("Cayley ratios", classes="pane-title")
                yield ListView(id="orbit-list")
        yield StatusBar()

    def on_mount(self) -> None:
        self.themes = load_themes()
        for theme in self.themes.values():
            self.register_theme(theme)
        self.theme = self._theme_name

        if not self.region_manager.get_all_regions():
            self.push_screen(
                ErrorScreen(
                    "No regions configured",
                    "Enable at least one region in `~/.config/hardcore/config.json`.",
                )
            )
            return

        keybindings_text = self.config.get("ui", {}).get(
            "statusbar_keybindings", UI_DEFAULTS["statusbar_keybindings"]
        )
        self.query_one(StatusBar).set_keybindings(
            keybindings_text.format(color=self.get_keybinding_style())
        )
        self.query_one("#parameter-input", Input).focus()

    # --- Evaluation ---
    def _evaluate(self, text: str) -> None:
        try:
            lam = GaussianRational.parse(text)
        except HardcoreError as e:
            self.notify(str(e), severity="error")
            return
        self.query_one(StatusBar).loading_status = f"Evaluating {lam}..."
        verdicts = self.query_one("#verdicts-list", ListView)
        verdicts.clear()
        verdicts.mount(LoadingIndicator())
        delta, depth = self.delta, self.depth
        self.run_worker(
            lambda: parameter_report(lam, delta, self.region_manager, depth),
            name="report_loader",
            thread=True,
            exclusive=True,
        )

    def on_worker_state_changed(self, event: Worker.StateChanged) -> None:
        if getattr(event.worker, "name", None) != "report_loader":
            return
        if event.state is WorkerState.SUCCESS:
            self._show_report(event.worker.result)
        elif event.state is WorkerState.ERROR:
            self._show_error(event.worker.error)

    def _clear_loading(self) -> ListView:
        verdicts = self.query_one("#verdicts-list", ListView)
        try:
            verdicts.query_one(LoadingIndicator).remove()
        except NoMatches:
            pass
        return verdicts

    def _show_report(self, report: ParameterReport) -> None:
        self.report = report
        self.query_one(StatusBar).loading_status = f"lambda = {report.lam}, Delta = {report.delta}"
        verdicts = self._clear_loading()
        verdicts.clear()
        for verdict in report.verdicts:
            verdicts.append(VerdictItem(verdict))

        facts = self.query_one("#facts-list", ListView)
        facts.clear()
        for label, value in report.facts():
            facts.append(FactItem(label, value))

        orbit = self.query_one("#orbit-list", ListView)
        orbit.clear()
        first = report.depth - len(report.orbit_tail) + 1
        for k, value in enumerate(report.orbit_tail):
            orbit.append(FactItem(f"R(T_{first + k})", value))

    def _show_error(self, error: Optional[BaseException]) -> None:
        self.query_one(StatusBar).loading_status = "Evaluation failed."
        verdicts = self._clear_loading()
        logger.error("Report worker failed: %s", error)
        verdicts.mount(ErrorMessage(f"Evaluation failed: {error}"))

    # --- Events and actions ---
    def on_input_submitted(self, event: Input.Submitted) -> None:
        if event.input.id == "parameter-input" and event.value.strip():
            self._evaluate(event.value)

    def on_select_changed(self, event: Select.Changed) -> None:
        if event.select.id == "delta-select" and event.value is not Select.BLANK:
            self.delta = int(event.value)
            self.action_refresh()

    def action_refresh(self) -> None:
        text = self.query_one("#parameter-input", Input).value.strip()
        if text:
            self._evaluate(text)

    def action_focus_parameter(self) -> None:
        self.query_one("#parameter-input", Input).focus()

    def action_show_settings(self) -> None:
        self.push_screen(SettingsScreen(), self.on_settings_closed)

    def on_settings_closed(self, _: Any) -> None:
        self.region_manager = RegionManager(self.config)
        self.action_refresh()

    def action_switch_theme(self, theme: str) -> None:
        self.theme = theme
