"""
自定义异常模块

包含异常类定义和全局异常处理器
"""

from typing import Optional
from fastapi import Request, status
from fastapi.exceptions import HTTPException, RequestValidationError
from fastapi.responses import JSONResponse

from app.schemas import ApiResponse, ResponseCode


# ========== 异常类定义 ==========


class PackingException(Exception):
    """
    图填装服务基础异常类

    Attributes:
        message: 错误消息
        code: 错误码
    """

    def __init__(self, message: str, code: Optional[int] = None):
        self.message = message
        self.code = code
        super().__init__(self.message)


class GraphFormatError(PackingException):
    """图文件 / 图载荷格式错误"""
    code = ResponseCode.ERROR_GRAPH_FORMAT

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"第 {line} 行: {message}"
        super().__init__(message, code=self.code)


class HypothesisViolationError(PackingException):
    """输入不满足定理前提"""
    code = ResponseCode.ERROR_HYPOTHESIS
    hypothesis = "hypothesis"

    def __init__(self, message: str):
        super().__init__(message, code=self.code)


class SizeMismatchError(HypothesisViolationError):
    """G 与 H 顶点数不一致"""
    code = ResponseCode.ERROR_SIZE_MISMATCH
    hypothesis = "SizeMismatch"


class IsolatedVertexError(HypothesisViolationError):
    """H 含孤立点"""
    code = ResponseCode.ERROR_ISOLATED_VERTEX
    hypothesis = "IsolatedVertexInH"


class MaxDegreeExceededError(HypothesisViolationError):
    """H 最大度超过 √n / maxdeg_divisor"""
    code = ResponseCode.ERROR_MAX_DEGREE_EXCEEDED
    hypothesis = "MaxDegreeExceeded"


class TooManyMissingEdgesError(HypothesisViolationError):
    """G 的边数超过 n - δ(H) - 1"""
    code = ResponseCode.ERROR_TOO_MANY_MISSING_EDGES
    hypothesis = "TooManyMissingEdges"


class NotABijectionError(PackingException):
    """映射不是双射"""
    code = ResponseCode.ERROR_NOT_A_BIJECTION

    def __init__(self, message: str = "映射不是双射"):
        super().__init__(message, code=self.code)


class InstanceTooLargeError(PackingException):
    """实例超出穷举搜索的规模上限"""
    code = ResponseCode.ERROR_INSTANCE_TOO_LARGE

    def __init__(self, what: str, size: int, limit: int):
        self.limit = limit
        super().__init__(f"{what}: 规模 {size} 超出上限 {limit}", code=self.code)


class ParameterOutOfRangeError(PackingException):
    """构造参数越界"""
    code = ResponseCode.ERROR_PARAMETER_OUT_OF_RANGE

    def __init__(self, message: str):
        super().__init__(message, code=self.code)


class UnknownModelSpecError(PackingException):
    """未知的随机图模型"""
    code = ResponseCode.ERROR_UNKNOWN_MODEL_SPEC

    def __init__(self, spec: str):
        super().__init__(f"未知的随机图模型: {spec}", code=self.code)


class VertexOutOfRangeError(PackingException):
    """顶点编号越界"""
    code = ResponseCode.ERROR_VERTEX_OUT_OF_RANGE

    def __init__(self, vertex: int, n: int):
        super().__init__(f"顶点 {vertex} 越界 (n={n})", code=self.code)


class GuaranteeViolationError(PackingException):
    """
    引擎内部的保证失效

    Attributes:
        stage: 失效阶段标识，例如 "S1"、"Lemma2"、"Stage4-Hall"
        reason: 失效原因
    """
    code = ResponseCode.ERROR_GUARANTEE_VIOLATION

    def __init__(self, stage: str, reason: str):
        self.stage = stage
        self.reason = reason
        super().__init__(f"[{stage}] {reason}", code=self.code)


# ========== 异常处理器 ==========


async def http_exception_handler(request: Request, exc: HTTPException) -> JSONResponse:
    """
    处理 HTTP 异常

    Args:
        request: 请求对象
        exc: HTTP 异常

    Returns:
        统一格式的错误响应
    """
    return JSONResponse(
        status_code=exc.status_code,
        content=ApiResponse.error(
            code=exc.status_code,
            message=exc.detail,
            data=None
        ).model_dump()
    )


async def validation_exception_handler(request: Request, exc: RequestValidationError) -> JSONResponse:
    """
    处理请求参数验证异常

    Args:
        request: 请求对象
        exc: 验证异常

    Returns:
        统一格式的错误响应
    """
    return JSONResponse(
        status_code=status.HTTP_400_BAD_REQUEST,
        content=ApiResponse.error(
            code=ResponseCode.VALIDATION_ERROR,
            message="请求参数验证失败",
            data=None
        ).model_dump()
    )


async def packing_exception_handler(request: Request, exc: PackingException) -> JSONResponse:
    """
    处理业务异常

    输入类错误返回 400，其余返回 500
    """
    if isinstance(exc, GuaranteeViolationError):
        status_code = status.HTTP_500_INTERNAL_SERVER_ERROR
    else:
        status_code = status.HTTP_400_BAD_REQUEST
    return JSONResponse(
        status_code=status_code,
        content=ApiResponse.error(
            code=getattr(exc, "code", ResponseCode.INTERNAL_ERROR),
            message=exc.message,
            data=None
        ).model_dump()
    )


async def general_exception_handler(request: Request, exc: Exception) -> JSONResponse:
    """
    处理所有未捕获的异常

    Args:
        request: 请求对象
        exc: 通用异常

    Returns:
        统一格式的错误响应
    """
    return JSONResponse(
        status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
        content=ApiResponse.error(
            code=ResponseCode.INTERNAL_ERROR,
            message="服务器内部错误",
            data=None
        ).model_dump()
    )


# ========== 注册函数 ==========


def register_exception_handlers(app) -> None:
    """
    注册全局异常处理器到 FastAPI 应用

    Args:
        app: FastAPI 应用实例
    """
    app.add_exception_handler(HTTPException, http_exception_handler)
    app.add_exception_handler(RequestValidationError, validation_exception_handler)
    app.add_exception_handler(PackingException, packing_exception_handler)
    app.add_exception_handler(Exception, general_exception_handler)
