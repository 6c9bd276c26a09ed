from .cp import check_cp_schedule, export_cp, export_cp_text, load_schema
from .milp import (
    Constraint,
    MilpModel,
    check_assignment,
    check_schedule,
    export_milp,
    export_milp_text,
    parse_lp,
    schedule_assignment,
)

__all__ = [
    "Constraint", "MilpModel", "check_assignment", "check_cp_schedule", "check_schedule", "export_cp",
    "export_cp_text", "export_milp", "export_milp_text", "load_schema", "parse_lp", "schedule_assignment",
]
