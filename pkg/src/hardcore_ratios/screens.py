from __future__ import annotations

from textual.app import ComposeResult
from textual.binding import Binding
from textual.containers import Vertical
from textual.screen import Screen
from textual.widgets import (
    Button,
    Footer,
    Header,
    Input,
    Label,
    ListItem,
    ListView,
    Markdown,
    Select,
    TabbedContent,
    TabPane,
)

from .config import load_themes, logger, save_config
from .regions import AVAILABLE_REGIONS
from .widgets import RegionCheckbox


class ErrorScreen(Screen):
    def __init__(self, title: str, message: str):
        super().__init__()
        self.title = title
        self.message = message

    def compose(self) -> ComposeResult:
        yield Header()
        yield Label(self.title, classes="error-title")
        yield Markdown(self.message)
        yield Footer()

    def on_mount(self) -> None:
        self.bind("q", "quit", "Quit")


class SettingsScreen(Screen):
    """Theme, enabled regions and orbit depth."""

    BINDINGS = [
        Binding("escape,q", "app.pop_screen", "Back"),
    ]

    def compose(self) -> ComposeResult:
        yield Header()
        yield Footer()
        with TabbedContent(id="settings-tabs"):
            with TabPane("Regions", id="regions-tab"):
                yield ListView(id="regions-list")
            with TabPane("Explorer", id="explorer-tab"):
                with Vertical():
                    yield Label("Cayley orbit depth", classes="settings-label")
                    yield Input(placeholder="60", id="depth-input", type="integer")
            with TabPane("Theme", id="theme-tab"):
                yield Select([], id="theme-select", prompt="Select a theme")
        yield Button("Save", id="save-settings", classes="settings-button")

    def on_mount(self) -> None:
        self.title = "Settings"
        enabled = self.app.config.get("regions") or {name: {} for name in AVAILABLE_REGIONS}
        regions_list = self.query_one("#regions-list", ListView)
        for name in AVAILABLE_REGIONS:
            regions_list.append(ListItem(RegionCheckbox(name, name in enabled, region=name)))

        self.query_one("#depth-input", Input).value = str(self.app.depth)

        theme_select = self.query_one("#theme-select", Select)
        themes = load_themes()
        theme_select.set_options([(theme, theme) for theme in themes.keys()])
        if self.app.theme_name in themes:
            theme_select.value = self.app.theme_name
        else:
            theme_select.clear()

    def on_select_changed(self, event: Select.Changed) -> None:
        if event.select.id == "theme-select" and event.value is not Select.BLANK:
            self.app.theme = event.value

    def on_button_pressed(self, event: Button.Pressed) -> None:
        if event.button.id == "save-settings":
            self.save_settings()

    def save_settings(self) -> None:
        config = self.app.config
        previous = config.get("regions") or {}
        regions = {}
        for checkbox in self.query(RegionCheckbox):
            if checkbox.value:
                regions[checkbox.region] = previous.get(checkbox.region, {})
        if not regions:
            self.app.notify("Enable at least one region.", severity="error")
            return
        config["regions"] = regions

        depth_text = self.query_one("#depth-input", Input).value.strip()
        if depth_text:
            depth = max(1, int(depth_text))
            config.setdefault("explore", {})["depth"] = depth
            self.app.depth = depth

        selected_theme = self.query_one("#theme-select", Select).value
        if selected_theme is not Select.BLANK:
            config["theme"] = selected_theme

        save_config(config)
        logger.info("Settings saved: regions %s", ", ".join(regions))
        self.app.notify("Settings saved!")
        self.dismiss()
