import logging                  # Configuração do log da aplicação (nível vindo de settings ou de -v).
import sys
from typing import Optional, Sequence

from app.api.commands import build_parser   # Parser com todos os subcomandos, definido em 'app/api/commands.py'.
from app.core.config import settings        # Configurações globais (nome, versão, nível de log, precisão).
from app.core.exceptions import RibbonError


def _log_level(verbose: int) -> int | str:
    if verbose >= 2:
        return logging.DEBUG
    if verbose == 1:
        return logging.INFO
    return settings.LOG_LEVEL


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Ponto de entrada do CLI.

    Returns:
        int: 0 em caso de sucesso, 1 para entrada inválida, 2 para falha de certificação.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)  # erros de uso chegam aqui como InvalidInputError
        logging.basicConfig(level=_log_level(args.verbose), format="%(levelname)s: %(message)s", force=True)
        output = args.handler(args)
    except RibbonError as e:
        # Equivalente às respostas HTTP de erro: a mensagem vai para stderr e o código de saída indica o tipo.
        logging.error(f"{type(e).__name__}: {e.detail}")
        print(f"erro: {e.detail}", file=sys.stderr)
        return e.exit_code
    sys.stdout.write(output)
    return args.exit_status


if __name__ == "__main__":
    sys.exit(main())
