"""Dependencies comunes para los endpoints"""
from app.core.engine import CommunicationMode
from app.core.graph import Graph, generate_random_graph, load_graph
from app.schemas.apsp import ModeOptions
from app.schemas.graph import GraphGenerateRequest, GraphSource

def build_graph(params: GraphGenerateRequest) -> Graph:
    return generate_random_graph(
        params.n,
        params.p,
        params.wlo,
        params.whi,
        seed=params.seed,
        directed=params.directed,
        integer_weights=params.integer_weights,
        zero_weight_fraction=params.zero_weight_fraction,
    )

def resolve_graph(source: GraphSource) -> Graph:
    """Grafo desde texto o desde parámetros de generación"""
    if source.graph_text is not None:
        return load_graph(source.graph_text)
    return build_graph(source.generate)

def resolve_mode(options: ModeOptions) -> CommunicationMode:
    return CommunicationMode(direction=options.direction, discipline=options.discipline)
