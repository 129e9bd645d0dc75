"""Maximum-ignorance belief updating: belief trees, the ignorance functional,
update events and joint anticipation."""

from ._core import (
    IgnoranceError,
    Session,
    count_joint_paths,
    credence_gap,
    credence_gap_argmin,
    credence_remainder,
    expectation,
    fixture_source,
    fixtures,
    parse_scenario,
    render_text,
    run_scenario,
    schema,
)

__all__ = [
    "IgnoranceError",
    "Session",
    "count_joint_paths",
    "credence_gap",
    "credence_gap_argmin",
    "credence_remainder",
    "expectation",
    "fixture_source",
    "fixtures",
    "parse_scenario",
    "render_text",
    "run_scenario",
    "schema",
]
