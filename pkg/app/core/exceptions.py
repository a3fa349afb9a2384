class RibbonError(Exception):
    """
    Erro base da aplicação. Cumpre o papel que a HTTPException tinha na API:
    carrega uma mensagem 'detail' e o código de saída que o CLI deve devolver.
    """
    exit_code: int = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class InvalidInputError(RibbonError, ValueError):
    """Entrada malformada ou pré-condição violada (código de saída 1)."""
    exit_code = 1


class CertificationError(RibbonError, ArithmeticError):
    """A computação não pôde ser certificada dentro dos limites configurados (código de saída 2)."""
    exit_code = 2
