"""Explorer wiring, driven headless through Textual's test pilot."""
import asyncio

from textual.widgets import ListView, LoadingIndicator

from hardcore_ratios.app import HardcoreApp


def test_clear_loading_with_and_without_indicator(config_home):
    async def run():
        app = HardcoreApp(config={})
        async with app.run_test() as pilot:
            verdicts = app._clear_loading()
            assert isinstance(verdicts, ListView)

            await verdicts.mount(LoadingIndicator())
            assert len(verdicts.query(LoadingIndicator)) == 1
            app._clear_loading()
            await pilot.pause()
            assert len(verdicts.query(LoadingIndicator)) == 0

    asyncio.run(run())
