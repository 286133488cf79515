"""Cell-centered variational discrete element solver for linear Cosserat elasticity."""

from .mesh import (
    Mesh,
    MeshError,
    FacetPartition,
    facet_classification,
    generate_rect_mesh,
    generate_box_mesh,
    generate_quarter_plate_mesh,
    load_mesh,
    save_mesh_json,
)
from .reconstruction import (
    StencilError,
    FacetStencils,
    select_support,
    barycentric_coords,
    build_facet_operator,
    build_gradient_operator,
    p1_eval,
    dump_stencils_csv,
)
from .materials import (
    CosseratMaterial2D,
    CosseratMaterial3D,
    cosserat_strain,
    skew_contraction,
    stress_2d,
    couple_2d,
    stress_3d,
    couple_3d,
    characteristic_length,
    young_modulus,
)
from .system import (
    DofMap,
    BoundaryCondition,
    DiscreteOperators,
    build_operators,
    facet_quadrature,
    assemble_elastic,
    assemble_inner_penalty,
    assemble_nitsche,
    assemble_mass,
    assemble_damping,
    assemble_load,
    compose_system,
    interpolate_cellwise,
    export_matrix_market,
    export_vector,
)
from .solver import (
    SolveError,
    SolveInfo,
    ConditionEstimate,
    TimeHistory,
    FacetLoadSet,
    solve_static,
    condition_estimate,
    crank_nicolson_run,
    stress_field,
    dem_post,
    locate_cell,
    evaluate_field,
    write_time_series_csv,
)
from .shear1d import (
    ShearLayerProfile,
    solve_shear_layer,
    shear_layer_closed_form,
)
from .io_vtk import (
    write_vtk,
    write_table_csv,
    write_report_json,
    write_report_text,
)
from .cases import (
    CaseError,
    CaseSpec,
    CaseResult,
    RunOptions,
    ProbeSpec,
    PulseLoad,
    DynamicSpec,
    Variant,
    ComponentStats,
    ErrorReport,
    stress_concentration,
    ricker_wavelet,
    ricker_source,
    wave_speed_probe,
    run_case,
    builtin_cases,
)

__version__ = "0.1.0"
