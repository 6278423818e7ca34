"""Drawup co-movement networks from price panels."""

try:
    from . import _drawnet as _core
except ImportError:  # in-tree build: the extension sits next to the build outputs
    import _drawnet as _core

StageError = _core.StageError
rolling_epsilon = _core.rolling_epsilon
local_extrema = _core.local_extrema
detect_drawups = _core.detect_drawups
estimate_dependency = _core.estimate_dependency
connectivity = _core.connectivity
strongly_connected_components = _core.strongly_connected_components
centrality = _core.centrality
classify_regions = _core.classify_regions
analyze_weights = _core.analyze_weights
generate_panel = _core.generate_panel
parse_config = _core.parse_config


def run_pipeline(config):
    """Run every stage. `config` is config-file text or a dict of config keys."""
    if isinstance(config, dict):
        lines = []
        for key, value in config.items():
            for item in value if isinstance(value, (list, tuple)) else [value]:
                if isinstance(item, bool):
                    item = "true" if item else "false"
                lines.append(f"{key} = {item}")
        config = "\n".join(lines) + "\n"
    return _core.run_pipeline(config)


__all__ = [
    "StageError",
    "rolling_epsilon",
    "local_extrema",
    "detect_drawups",
    "estimate_dependency",
    "connectivity",
    "strongly_connected_components",
    "centrality",
    "classify_regions",
    "analyze_weights",
    "generate_panel",
    "parse_config",
    "run_pipeline",
]
