from rest_framework.decorators import api_view
from rest_framework.generics import get_object_or_404
from rest_framework.response import Response
from fitting.models import RunRecord
from fitting.serializers import RunRecordSerializer

@api_view(['GET'])
def getRoutes(request):
    routes = [
        'GET /api/',
        'GET /api/runs',
        'GET /api/runs/:id',
    ]
    return Response(routes)

@api_view(['GET'])
def getRuns(request):
    runs = RunRecord.objects.all()
    command = request.query_params.get('command')
    if command:
        runs = runs.filter(command=command)
    serializer = RunRecordSerializer(runs, many=True)
    return Response(serializer.data)

@api_view(['GET'])
def getRun(request, pk):
    run = get_object_or_404(RunRecord, id=pk)
    serializer = RunRecordSerializer(run, many=False)
    return Response(serializer.data)
