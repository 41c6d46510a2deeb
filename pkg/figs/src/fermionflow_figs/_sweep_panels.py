"""Shared drawing for the measure-sweep panels (one protocol family each)."""

from .csvio import ArtifactError, FigureSpec


def sweep_spec(figure_id: str, param: str, xlabel: str) -> FigureSpec:
    return FigureSpec(
        figure_id=figure_id,
        expected_command="measures-sweep",
        xlabel=xlabel,
        ylabel="measure",
        logx=True,
        required_columns=(param, "mu_T", "mu_C"),
    )


def make_draw(protocol: str, param: str):
    def draw(ax, arts):
        art = arts[0]
        if art.config.get("protocol") != protocol:
            raise ArtifactError(
                f"{art.path} sweeps the '{art.config.get('protocol')}' family, expected '{protocol}'"
            )
        ax.plot(art.columns[param], art.columns["mu_T"], label=r"$\mu_T$")
        ax.plot(art.columns[param], art.columns["mu_C"], label=r"$\mu_C$")

    return draw
