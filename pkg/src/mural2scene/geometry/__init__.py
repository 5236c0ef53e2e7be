"""Transfer geometry: billboards, crosses, architecture, projection checks and skyboxes."""

from .architecture import make_architecture
from .billboard import billboard_orientation, billboard_yaw, make_billboard_quad
from .cross import make_cross, silhouette_width
from .mesh import BillboardFlag, MaterialRef, Mesh, Primitive, rotate_y
from .projection import camera_basis, project_points, projection_match_check
from .skybox import contact_sheet, make_skybox, max_seam_difference, panorama_to_cubemap
